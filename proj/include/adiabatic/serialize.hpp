#pragma once

// CSV and JSON emitters for sweep tables, fidelity traces and condition
// reports.  Every floating-point value is written with 17 significant
// digits so a re-parse reproduces the exact doubles; +infinity becomes the
// literal "inf" in CSV and the sentinel object {"inf": true} in JSON.
// Files are deterministic byte-for-byte for a given input.

#include <adiabatic/conditions.hpp>
#include <adiabatic/spin.hpp>
#include <adiabatic/sweep.hpp>

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace adiabatic {

inline constexpr const char* schema_id = "adiabatic-probe/1";

namespace detail {

template <class S>
std::string format_number(S v) {
  if (std::isinf(v)) return v > S(0) ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, static_cast<double>(v),
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// JSON value for a possibly-infinite number: raw digits or the sentinel.
template <class S>
std::string json_number(S v) {
  if (std::isinf(v)) return v > S(0) ? "{\"inf\": true}" : "{\"inf\": false}";
  return format_number(v);
}

template <class S>
void append_params_csv(std::string& out, const FieldParams<S>& p) {
  out += "# omega0: " + format_number(p.omega0) + "\n";
  out += "# omega1: " + format_number(p.omega1) + "\n";
  out += "# omega-prime: " + format_number(p.omega_prime) + "\n";
  out += "# k: " + format_number(p.k()) + "\n";
  out += "# r: " + format_number(p.r()) + "\n";
}

template <class S>
std::string params_json(const FieldParams<S>& p) {
  std::string s = "{";
  s += "\"omega0\": " + format_number(p.omega0);
  s += ", \"omega1\": " + format_number(p.omega1);
  s += ", \"omega_prime\": " + format_number(p.omega_prime);
  s += ", \"k\": " + format_number(p.k());
  s += ", \"r\": " + format_number(p.r());
  s += "}";
  return s;
}

template <class S>
std::string number_list_json(const std::vector<S>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_number(v[i]);
  }
  s += "]";
  return s;
}

inline std::string string_list_json(const std::vector<std::string>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += "\"" + v[i] + "\"";
  }
  s += "]";
  return s;
}

}  // namespace detail

template <class S>
std::string to_csv(const SweepTable<S>& table) {
  std::string out;
  out += std::string("# schema: ") + schema_id + "\n";
  out += "# kind: sweep\n";
  out += "# method: closed-form\n";
  out += "# omega1: " + detail::format_number(table.grid.omega1) + "\n";
  out += "k,r,quantity,value,resonant\n";
  for (const auto& row : table.rows) {
    out += detail::format_number(row.k) + ",";
    out += detail::format_number(row.r) + ",";
    out += row.quantity + ",";
    out += detail::format_number(row.value) + ",";
    out += row.resonant ? "true" : "false";
    out += "\n";
  }
  return out;
}

template <class S>
std::string to_json(const SweepTable<S>& table) {
  std::string out = "{\n";
  out += std::string("  \"schema\": \"") + schema_id + "\",\n";
  out += "  \"kind\": \"sweep\",\n";
  out += "  \"params\": {";
  out += "\"omega1\": " + detail::format_number(table.grid.omega1);
  out += ", \"k_values\": " + detail::number_list_json(table.grid.k_values);
  out += ", \"r_values\": " + detail::number_list_json(table.grid.r_values);
  out += ", \"quantities\": " + detail::string_list_json(table.grid.quantities);
  out += "},\n";
  out += "  \"provenance\": {\"method\": \"closed-form\", \"float_digits\": 17},\n";
  out += "  \"rows\": [\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    out += "    {\"k\": " + detail::format_number(row.k);
    out += ", \"r\": " + detail::format_number(row.r);
    out += ", \"quantity\": \"" + row.quantity + "\"";
    out += ", \"value\": " + detail::json_number(row.value);
    out += std::string(", \"resonant\": ") + (row.resonant ? "true" : "false") + "}";
    if (i + 1 < table.rows.size()) out += ",";
    out += "\n";
  }
  out += "  ]\n}\n";
  return out;
}

template <class S>
std::string to_csv(const FidelityTrace<S>& trace) {
  std::string out;
  out += std::string("# schema: ") + schema_id + "\n";
  out += "# kind: trace\n";
  out += std::string("# method: ") + method_name(trace.method) + "\n";
  detail::append_params_csv(out, trace.params);
  out += "t,fidelity\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i)
    out += detail::format_number(trace.times[i]) + "," +
           detail::format_number(trace.values[i]) + "\n";
  return out;
}

template <class S>
std::string to_json(const FidelityTrace<S>& trace) {
  std::string out = "{\n";
  out += std::string("  \"schema\": \"") + schema_id + "\",\n";
  out += "  \"kind\": \"trace\",\n";
  out += "  \"params\": " + detail::params_json(trace.params) + ",\n";
  out += std::string("  \"provenance\": {\"method\": \"") + method_name(trace.method) +
         "\", \"float_digits\": 17},\n";
  out += "  \"rows\": [\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    out += "    {\"t\": " + detail::format_number(trace.times[i]);
    out += ", \"fidelity\": " + detail::format_number(trace.values[i]) + "}";
    if (i + 1 < trace.times.size()) out += ",";
    out += "\n";
  }
  out += "  ]\n}\n";
  return out;
}

template <class S>
std::string to_csv(const ConditionReport<S>& rep, const FieldParams<S>& p) {
  std::string out;
  out += std::string("# schema: ") + schema_id + "\n";
  out += "# kind: conditions\n";
  detail::append_params_csv(out, p);
  out += "# horizon: " + detail::format_number(rep.horizon) + "\n";
  out += "quantity,value\n";
  out += "c1," + detail::format_number(rep.c1) + "\n";
  out += "tong_a," + detail::format_number(rep.tong_a) + "\n";
  out += "tong_b," + detail::format_number(rep.tong_b) + "\n";
  out += "tong_c," + detail::format_number(rep.tong_c) + "\n";
  out += "wu_c3," + detail::format_number(rep.wu_c3) + "\n";
  out += "wu_denominator," + detail::format_number(rep.wu_denominator) + "\n";
  out += std::string("resonant,") + (rep.resonant ? "true" : "false") + "\n";
  return out;
}

template <class S>
std::string to_json(const ConditionReport<S>& rep, const FieldParams<S>& p) {
  std::string out = "{\n";
  out += std::string("  \"schema\": \"") + schema_id + "\",\n";
  out += "  \"kind\": \"conditions\",\n";
  std::string params = detail::params_json(p);
  params.pop_back();  // reopen to append the horizon
  out += "  \"params\": " + params +
         ", \"horizon\": " + detail::format_number(rep.horizon) + "},\n";
  out += "  \"provenance\": {\"method\": \"closed-form + self-checked quadrature\", "
         "\"quadrature_rel_tol\": 1e-08, \"float_digits\": 17},\n";
  out += "  \"report\": {";
  out += "\"c1\": " + detail::format_number(rep.c1);
  out += ", \"tong_a\": " + detail::format_number(rep.tong_a);
  out += ", \"tong_b\": " + detail::format_number(rep.tong_b);
  out += ", \"tong_c\": " + detail::format_number(rep.tong_c);
  out += ", \"wu_c3\": " + detail::json_number(rep.wu_c3);
  out += ", \"wu_denominator\": " + detail::format_number(rep.wu_denominator);
  out += std::string(", \"resonant\": ") + (rep.resonant ? "true" : "false");
  out += "}\n}\n";
  return out;
}

// Rebuilds a sweep table from its JSON form; used to verify that
// serialization round-trips exactly.
template <class S = double>
SweepTable<S> sweep_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("schema").template get<std::string>() != schema_id)
    throw std::invalid_argument("sweep_from_json: unknown schema");
  if (j.at("kind").template get<std::string>() != "sweep")
    throw std::invalid_argument("sweep_from_json: not a sweep record");
  SweepTable<S> table;
  const auto& params = j.at("params");
  table.grid.omega1 = params.at("omega1").template get<S>();
  table.grid.k_values = params.at("k_values").template get<std::vector<S>>();
  table.grid.r_values = params.at("r_values").template get<std::vector<S>>();
  table.grid.quantities = params.at("quantities").template get<std::vector<std::string>>();
  for (const auto& rj : j.at("rows")) {
    SweepRow<S> row;
    row.k = rj.at("k").template get<S>();
    row.r = rj.at("r").template get<S>();
    row.quantity = rj.at("quantity").template get<std::string>();
    const auto& v = rj.at("value");
    if (v.is_object())
      row.value = v.value("inf", false) ? std::numeric_limits<S>::infinity()
                                        : -std::numeric_limits<S>::infinity();
    else
      row.value = v.template get<S>();
    row.resonant = rj.at("resonant").template get<bool>();
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace adiabatic
