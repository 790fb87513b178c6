#pragma once

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pascs/errors.hpp"
#include "pascs/pnd.hpp"
#include "pascs/state_spec.hpp"
#include "pascs/witnesses.hpp"

namespace pascs {

// RFC-4180 style quoting: quote when the field contains comma, quote or
// newline; embedded quotes are doubled.
inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  out += '\n';
  return out;
}

// Flat key = value config format (one pair per line, '#' comments); mirrors
// the CLI flags.
inline std::map<std::string, std::string> read_kv_file(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      size_t b = s.find_first_not_of(" \t\r");
      size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = value;
  }
  return kv;
}

inline nlohmann::json to_json(const StateSpec& spec) {
  nlohmann::json j;
  for (const auto& [k, v] : kv_record(spec)) {
    if (k == "op") j[k] = v;
    else if (k == "m") j[k] = spec.m;
    else j[k] = std::stod(v);
  }
  return j;
}

// Fixed witness column order shared by CSV and JSON: Q, then D(n-1) and
// d(n-1) ascending, A3, S(n) ascending, finally precision_demoted.
inline std::vector<std::string> witness_column_names(const WitnessReport& rep) {
  std::vector<std::string> names{"Q"};
  for (const auto& [n, v] : rep.D) names.push_back("D" + std::to_string(n - 1));
  for (const auto& [n, v] : rep.d) names.push_back("d" + std::to_string(n - 1));
  names.push_back("A3");
  for (const auto& [n, v] : rep.S) names.push_back("S" + std::to_string(n));
  names.push_back("precision_demoted");
  return names;
}

inline std::vector<std::string> witness_column_values(const WitnessReport& rep) {
  auto fmt = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  std::vector<std::string> vals{fmt(rep.q_mandel)};
  for (const auto& [n, v] : rep.D) vals.push_back(fmt(v));
  for (const auto& [n, v] : rep.d) vals.push_back(fmt(v));
  vals.push_back(fmt(rep.a3));
  for (const auto& [n, v] : rep.S) vals.push_back(fmt(v));
  vals.push_back(rep.precision_demoted ? "1" : "0");
  return vals;
}

inline std::string witness_csv(const WitnessReport& rep, bool header = true) {
  std::vector<std::string> head, row;
  for (const auto& [k, v] : kv_record(rep.spec)) {
    head.push_back(k);
    row.push_back(v);
  }
  for (const auto& name : witness_column_names(rep)) head.push_back(name);
  for (const auto& val : witness_column_values(rep)) row.push_back(val);
  std::string out;
  if (header) out += csv_row(head);
  out += csv_row(row);
  return out;
}

inline nlohmann::json witness_json(const WitnessReport& rep) {
  nlohmann::json j;
  j["spec"] = to_json(rep.spec);
  auto put = [](nlohmann::json& obj, const std::string& key, double v) {
    if (std::isnan(v)) obj[key] = nullptr;
    else obj[key] = v;
  };
  put(j, "Q", rep.q_mandel);
  for (const auto& [n, v] : rep.D) put(j, "D" + std::to_string(n - 1), v);
  for (const auto& [n, v] : rep.d) put(j, "d" + std::to_string(n - 1), v);
  put(j, "A3", rep.a3);
  for (const auto& [n, v] : rep.S) put(j, "S" + std::to_string(n), v);
  j["flags"] = rep.flags;
  j["precision_demoted"] = rep.precision_demoted;
  return j;
}

// Distribution CSV: metadata header row with the spec record, then n, P_n.
inline void pnd_csv(const PhotonNumberDistribution& dist, std::ostream& os) {
  os << "# " << kv_string(dist.spec) << "\n";
  os << "# tail_mass=" << format_double(dist.tail_mass) << "\n";
  os << "n,P_n\n";
  for (int n = 0; n <= dist.n_report(); ++n)
    os << n << ',' << format_double(dist.probabilities[n]) << '\n';
}

}  // namespace pascs
