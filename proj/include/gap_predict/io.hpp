#ifndef GAP_PREDICT_IO_HPP
#define GAP_PREDICT_IO_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gap_predict/approx.hpp"
#include "gap_predict/error.hpp"
#include "gap_predict/predictor.hpp"
#include "gap_predict/signal.hpp"
#include "gap_predict/taper.hpp"

namespace gap_predict::io {

using json = nlohmann::json;

// Fixed 17-significant-digit rendering used by every text output.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

// ---- taper / approximant ---------------------------------------------------

inline json to_json(const TaperSpec& taper) {
  return json{{"family", std::string(to_string(taper.family()))}, {"nu", taper.nu()}};
}

inline TaperSpec taper_from_json(const json& j) {
  return TaperSpec(parse_taper_family(j.at("family").get<std::string>()), j.at("nu").get<double>());
}

inline json to_json(const Approximant& a) {
  return json{{"T", a.T},
              {"omega_gap", a.omega_gap},
              {"taper", to_json(a.taper)},
              {"d", a.d},
              {"gamma_c", a.gamma_c},
              {"gamma_s", a.gamma_s},
              {"a", a.a},
              {"eps2", a.eps2},
              {"fit_nodes", a.fit_nodes},
              {"dense_factor", a.dense_factor}};
}

inline Approximant approximant_from_json(const json& j) {
  try {
    Approximant a;
    a.T = j.at("T").get<double>();
    a.omega_gap = j.at("omega_gap").get<double>();
    a.taper = taper_from_json(j.at("taper"));
    a.d = j.at("d").get<int>();
    a.gamma_c = j.at("gamma_c").get<std::vector<double>>();
    a.gamma_s = j.at("gamma_s").get<std::vector<double>>();
    a.a = j.at("a").get<std::vector<double>>();
    a.eps2 = j.at("eps2").get<double>();
    a.fit_nodes = j.at("fit_nodes").get<int>();
    a.dense_factor = j.at("dense_factor").get<int>();
    if (a.a.size() != static_cast<std::size_t>(a.d)) {
      throw ValidationError("approximant coefficient count does not match d");
    }
    return a;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed approximant: ") + e.what());
  }
}

// ---- spectrum specs --------------------------------------------------------

/// {"omega_gap":, "kind":"tones"|"bump", "tones":[{"omega","re","im"}],
///  "bumps":[{"center","half_width","amplitude"}]}. An optional
/// "normalize_l1": true rescales the spectrum to unit L1 budget on load.
inline SpectrumSpec spec_from_json(const json& j) {
  try {
    const double gap = j.at("omega_gap").get<double>();
    const auto kind = j.at("kind").get<std::string>();
    SpectrumSpec spec = SpectrumSpec::tones(gap, {});
    if (kind == "tones") {
      std::vector<Tone> tones;
      for (const auto& t : j.value("tones", json::array())) {
        tones.push_back(Tone{t.at("omega").get<double>(),
                             {t.value("re", 0.0), t.value("im", 0.0)}});
      }
      spec = SpectrumSpec::tones(gap, std::move(tones));
    } else if (kind == "bump") {
      std::vector<Bump> bumps;
      for (const auto& b : j.value("bumps", json::array())) {
        bumps.push_back(Bump{b.at("center").get<double>(), b.at("half_width").get<double>(),
                             b.at("amplitude").get<double>()});
      }
      spec = SpectrumSpec::bumps(gap, std::move(bumps));
    } else {
      throw ValidationError("spectrum kind must be 'tones' or 'bump'");
    }
    if (j.value("normalize_l1", false)) spec = normalized_l1(spec);
    return spec;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed spectrum spec: ") + e.what());
  }
}

inline json to_json(const SpectrumSpec& spec) {
  json j{{"omega_gap", spec.omega_gap()}};
  if (spec.kind() == SpectrumKind::Tones) {
    j["kind"] = "tones";
    json tones = json::array();
    for (const auto& t : spec.tone_list()) {
      tones.push_back({{"omega", t.omega}, {"re", t.c.real()}, {"im", t.c.imag()}});
    }
    j["tones"] = tones;
  } else {
    j["kind"] = "bump";
    json bumps = json::array();
    for (const auto& b : spec.bump_list()) {
      bumps.push_back(
          {{"center", b.center}, {"half_width", b.half_width}, {"amplitude", b.amplitude}});
    }
    j["bumps"] = bumps;
  }
  return j;
}

// ---- CSV -------------------------------------------------------------------

inline std::string samples_csv(const UniformSamples& s) {
  std::string out = "t,x\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += format_double(s.time(i));
    out += ',';
    out += format_double(s.values[i]);
    out += '\n';
  }
  return out;
}

/// Reads the first two numeric columns (t, x) of a CSV with a header row.
inline UniformSamples read_samples_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty CSV");
  std::vector<double> ts;
  std::vector<double> xs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string a;
    std::string b;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',')) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected t,x");
    }
    try {
      ts.push_back(std::stod(a));
      xs.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  return UniformSamples::from_points(ts, xs);
}

inline json to_json(const EtaFit& fit, double t1) {
  return json{{"t1", t1},
              {"eta", fit.eta},
              {"residual", fit.residual},
              {"cond", std::isfinite(fit.cond) ? json(fit.cond) : json(nullptr)},
              {"near_singular", fit.near_singular}};
}

}  // namespace gap_predict::io

#endif  // GAP_PREDICT_IO_HPP
