#pragma once

// JSON forms used across the library and CLI:
//   matrix    {"n": <int>, "re": [[...]], "im": [[...]]}
//   spectrum  {"values": [...], "mults": [...]}

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "orbit_kahler/dynamics.hpp"
#include "orbit_kahler/uncertainty.hpp"

namespace orbit_kahler {

using json = nlohmann::json;

inline json matrix_to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ir = json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ir.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return json{{"n", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

/// Parses the matrix form. "im" may be omitted for real matrices.
inline Matrix matrix_from_json(const json& j) {
  try {
    const auto n = j.at("n").get<Index>();
    if (n < 1) throw Error(ErrorKind::ParseError, "matrix n must be >= 1");
    const json& re = j.at("re");
    const json* im = j.contains("im") ? &j.at("im") : nullptr;
    auto check_rows = [n](const json& rows, const char* name) {
      if (!rows.is_array() || static_cast<Index>(rows.size()) != n)
        throw Error(ErrorKind::ParseError, std::string(name) + " must have n rows");
      for (const auto& row : rows)
        if (!row.is_array() || static_cast<Index>(row.size()) != n)
          throw Error(ErrorKind::ParseError, std::string(name) + " rows must have n entries");
    };
    check_rows(re, "re");
    if (im) check_rows(*im, "im");
    Matrix m(n, n);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) {
        const double x = re[r][c].get<double>();
        const double y = im ? (*im)[r][c].get<double>() : 0.0;
        m(r, c) = {x, y};
      }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

inline json spectrum_to_json(const Spectrum& s) {
  return json{{"values", s.values}, {"mults", s.mults}};
}

inline Spectrum spectrum_from_json(const json& j) {
  try {
    Spectrum s;
    s.values = j.at("values").get<std::vector<double>>();
    s.mults = j.at("mults").get<std::vector<int>>();
    if (s.values.size() != s.mults.size() || s.values.empty())
      throw Error(ErrorKind::ParseError, "values and mults must be non-empty and equal length");
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

inline json report_to_json(const UncertaintyReport& r) {
  return json{{"deltaA", r.deltaA},
              {"deltaB", r.deltaB},
              {"product", r.product},
              {"geometric_bound", r.geometric_bound},
              {"rs_bound", r.rs_bound},
              {"slack_geometric", r.slack_geometric},
              {"slack_rs", r.slack_rs}};
}

/// One {"t": ..., "rho": {matrix}} object per line.
inline std::string trajectory_to_jsonl(const Trajectory& tr) {
  std::string out;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    out += json{{"t", tr.times[i]}, {"rho", matrix_to_json(tr.points[i].rho().matrix())}}.dump();
    out += '\n';
  }
  return out;
}

inline Config config_from_json(const json& j, Config cfg = {}) {
  try {
    auto set = [&j](const char* key, double& field) {
      if (j.contains(key)) field = j.at(key).get<double>();
    };
    set("hbar", cfg.hbar);
    set("tau_h", cfg.tau_h);
    set("tau_c", cfg.tau_c);
    set("tau_tr", cfg.tau_tr);
    set("tau_u", cfg.tau_u);
    set("tau_check", cfg.tau_check);
    set("fd_step", cfg.fd_step);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  cfg.validate();
  return cfg;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
}

}  // namespace orbit_kahler
