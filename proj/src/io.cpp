#include "ratdyn/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include "ratdyn/errors.hpp"

namespace ratdyn {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

void expect_header(std::istream& in, const std::string& header) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw ParseError("csv: expected header '" + header + "', got '" + line + "'");
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("csv: bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("csv: bad number '" + s + "'");
  }
}

SpherePoint point_from(const std::vector<std::string>& cells) {
  if (cells[2] == "1") return SpherePoint::infinity();
  if (cells[2] != "0") throw ParseError("csv: is_infinity must be 0 or 1");
  return Complex(to_double(cells[0]), to_double(cells[1]));
}

void write_point(std::ostream& out, const SpherePoint& p) {
  if (p.is_infinity()) {
    out << "inf,inf,1";
  } else {
    out << format_double(p.value().real()) << ',' << format_double(p.value().imag()) << ",0";
  }
}

}  // namespace

void write_cloud_csv(std::ostream& out, const std::vector<SpherePoint>& points) {
  out << "re,im,is_infinity\n";
  for (const SpherePoint& p : points) {
    write_point(out, p);
    out << '\n';
  }
}

std::vector<SpherePoint> read_cloud_csv(std::istream& in) {
  expect_header(in, "re,im,is_infinity");
  std::vector<SpherePoint> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 3) throw ParseError("csv: expected 3 columns in '" + line + "'");
    out.push_back(point_from(cells));
  }
  return out;
}

void write_weighted_csv(std::ostream& out, const WeightedCloud& cloud) {
  out << "re,im,is_infinity,weight\n";
  for (const Atom& a : cloud.atoms) {
    write_point(out, a.point);
    out << ',' << format_double(a.weight) << '\n';
  }
}

WeightedCloud read_weighted_csv(std::istream& in, const std::string& source) {
  expect_header(in, "re,im,is_infinity,weight");
  WeightedCloud cloud;
  cloud.provenance = Imported{source};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 4) throw ParseError("csv: expected 4 columns in '" + line + "'");
    cloud.atoms.push_back({point_from(cells), to_double(cells[3])});
  }
  return cloud;
}

void write_traces_csv(std::ostream& out, const std::vector<IterationTrace>& traces) {
  out << "level,probe_index,re,im\n";
  for (const IterationTrace& t : traces) {
    for (std::size_t p = 0; p < t.values.size(); ++p) {
      out << t.level << ',' << p << ',' << format_double(t.values[p].real()) << ','
          << format_double(t.values[p].imag()) << '\n';
    }
  }
}

void write_pgm(std::ostream& out, const GrayImage& image) {
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
}

nlohmann::json to_json(const VerifyReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckResult& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"measured", c.measured},
                      {"threshold", c.threshold},
                      {"detail", c.detail}});
  }
  return {{"schema", kSchemaVersion},
          {"example", report.example},
          {"map", report.formula},
          {"pass", report.pass},
          {"checks", checks}};
}

nlohmann::json to_json(const WitnessReport& report) {
  return {{"schema", kSchemaVersion},
          {"inputs", {{"map", report.map}, {"a", report.test}, {"eps", report.eps}}},
          {"norm_a", report.norm_a},
          {"n", report.n},
          {"probe_count", report.probes},
          {"min_ff", report.min_ff},
          {"max_ff", report.max_ff},
          {"min_faf", report.min_faf},
          {"max_faf", report.max_faf},
          {"min_b", report.min_b},
          {"pass", report.pass}};
}

nlohmann::json to_json(const std::vector<GapRecord>& gaps) {
  nlohmann::json records = nlohmann::json::array();
  for (const GapRecord& g : gaps) {
    records.push_back({{"k", g.k}, {"test", g.test}, {"gap", g.gap}, {"kind", g.kind}});
  }
  return {{"schema", kSchemaVersion}, {"gaps", records}};
}

nlohmann::json to_json(const ExampleRecord& record) {
  auto anchored = [](const Anchored& a) {
    return nlohmann::json{{"value", a.value}, {"anchor", a.anchor}};
  };
  nlohmann::json j{{"schema", kSchemaVersion},
                   {"name", record.name},
                   {"map", record.formula},
                   {"degree", record.map.degree()},
                   {"verifiable_checks", record.verifiable_checks}};
  // Facts the source does not state are left out rather than written empty.
  const std::pair<const char*, const Anchored*> facts[] = {{"julia", &record.julia_description},
                                                           {"k0", &record.k0},
                                                           {"k1", &record.k1},
                                                           {"algebra", &record.algebra}};
  for (const auto& [key, fact] : facts) {
    if (!fact->value.empty()) j[key] = anchored(*fact);
  }
  if (record.critical_in_julia_count) {
    j["critical_in_julia_count"] = {{"value", *record.critical_in_julia_count},
                                    {"anchor", record.critical_in_julia_anchor}};
  }
  if (!record.parameter.empty()) j["parameter"] = record.parameter;
  return j;
}

namespace {

void dump_into(std::ostream& out, const nlohmann::json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out << "{}";
      return;
    }
    out << "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out << ",\n";
      first = false;
      out << pad << nlohmann::json(it.key()).dump() << ": ";
      dump_into(out, it.value(), indent + 2);
    }
    out << '\n' << close << '}';
  } else if (j.is_array()) {
    if (j.empty()) {
      out << "[]";
      return;
    }
    out << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i > 0) out << ",\n";
      out << pad;
      dump_into(out, j[i], indent + 2);
    }
    out << '\n' << close << ']';
  } else if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v)) {
      out << format_double(v);
    } else {
      out << "null";
    }
  } else {
    out << j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& doc) {
  std::ostringstream out;
  dump_into(out, doc, 0);
  out << '\n';
  return out.str();
}

}  // namespace ratdyn
