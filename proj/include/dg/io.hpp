#pragma once

// Serialization helpers: fixed 17-significant-digit number formatting
// (bit-stable round trips), small CSV utilities, and the JSON parameter
// document accepted everywhere parameters are required.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dg/error.hpp"
#include "dg/params.hpp"

namespace dg {

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string csv_row(const std::vector<double>& vals) {
  std::string out;
  for (size_t i = 0; i < vals.size(); ++i) {
    if (i) out += ',';
    out += format_g17(vals[i]);
  }
  out += '\n';
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << content;
}

// A parameter document normalized to (nu, mu) plus the optional harmonic
// spring constant carried by the physical form.
struct ParameterDocument {
  NuMuParams params;
  double kappa = 0.0;
};

// Accepted forms:
//   {"nu":[nu1,nu2], "mu":[mu0,...,mu5]}
//   {"physical":{"m":..,"hbar":..,"D":..,"Dprime":..,"c":[..5..],"kappa":..}}
//   {"invariants":[i0,...,i5], "gauge":[nu1,mu1]}   (gauge optional -> (1,0))
inline ParameterDocument parse_parameter_document(const nlohmann::json& j) {
  ParameterDocument doc;
  if (j.contains("nu") && j.contains("mu")) {
    auto nu = j.at("nu");
    auto mu = j.at("mu");
    if (nu.size() != 2 || mu.size() != 6)
      fail(ErrorKind::InvalidArgument, "expected nu[2] and mu[6]");
    doc.params.nu1 = nu[0].get<double>();
    doc.params.nu2 = nu[1].get<double>();
    doc.params.mu0 = mu[0].get<double>();
    doc.params.mu1 = mu[1].get<double>();
    doc.params.mu2 = mu[2].get<double>();
    doc.params.mu3 = mu[3].get<double>();
    doc.params.mu4 = mu[4].get<double>();
    doc.params.mu5 = mu[5].get<double>();
  } else if (j.contains("physical")) {
    const auto& ph = j.at("physical");
    PhysicalParams p;
    p.mass = ph.at("m").get<double>();
    p.hbar = ph.at("hbar").get<double>();
    p.D = ph.value("D", 0.0);
    p.Dprime = ph.value("Dprime", 0.0);
    if (ph.contains("c")) {
      auto c = ph.at("c");
      if (c.size() != 5) fail(ErrorKind::InvalidArgument, "expected c[5]");
      for (int i = 0; i < 5; ++i) p.c[i] = c[i].get<double>();
    }
    p.kappa = ph.value("kappa", 0.0);
    doc.params = from_physical(p);
    doc.kappa = p.kappa;
  } else if (j.contains("invariants")) {
    auto iv = j.at("invariants");
    if (iv.size() != 6) fail(ErrorKind::InvalidArgument, "expected invariants[6]");
    std::array<double, 6> a;
    for (int i = 0; i < 6; ++i) a[i] = iv[i].get<double>();
    double nu1 = 1.0, mu1 = 0.0;
    if (j.contains("gauge")) {
      auto g = j.at("gauge");
      if (g.size() != 2) fail(ErrorKind::InvalidArgument, "expected gauge[2]");
      nu1 = g[0].get<double>();
      mu1 = g[1].get<double>();
    }
    doc.params = reconstruct(Invariants::from_array(a), nu1, mu1);
  } else {
    fail(ErrorKind::InvalidArgument,
         "parameter document must contain nu/mu, physical, or invariants");
  }
  if (j.contains("kappa")) doc.kappa = j.at("kappa").get<double>();
  doc.params.validate();
  return doc;
}

inline ParameterDocument load_parameter_document(const std::string& path) {
  return parse_parameter_document(nlohmann::json::parse(read_text_file(path)));
}

inline nlohmann::json to_json(const NuMuParams& p) {
  return {{"nu", {p.nu1, p.nu2}}, {"mu", {p.mu0, p.mu1, p.mu2, p.mu3, p.mu4, p.mu5}}};
}

inline nlohmann::json to_json(const Invariants& v) {
  return nlohmann::json(v.as_array());
}

inline nlohmann::json to_json(const GaugeElement& a) {
  return {{"Lambda", a.Lambda}, {"gamma", a.gamma}};
}

}  // namespace dg
