#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "ratdyn/bimodule.hpp"
#include "ratdyn/julia.hpp"
#include "ratdyn/measure.hpp"
#include "ratdyn/registry.hpp"
#include "ratdyn/transfer.hpp"

namespace ratdyn {

// Every number written by this module uses 17 significant digits, so a
// value read back is bit-identical to the one written.
std::string format_double(double v);

// Header `re,im,is_infinity`. The point at infinity is written as
// `inf,inf,1`.
void write_cloud_csv(std::ostream& out, const std::vector<SpherePoint>& points);
std::vector<SpherePoint> read_cloud_csv(std::istream& in);

// Header `re,im,is_infinity,weight`.
void write_weighted_csv(std::ostream& out, const WeightedCloud& cloud);
WeightedCloud read_weighted_csv(std::istream& in, const std::string& source = "csv");

// Header `level,probe_index,re,im`, one row per level and probe.
void write_traces_csv(std::ostream& out, const std::vector<IterationTrace>& traces);

// Binary PGM: "P5", width, height, maxval 255, then the pixel rows.
void write_pgm(std::ostream& out, const GrayImage& image);

// JSON documents carry "schema": 1.
constexpr int kSchemaVersion = 1;
nlohmann::json to_json(const VerifyReport& report);
nlohmann::json to_json(const WitnessReport& report);
nlohmann::json to_json(const std::vector<GapRecord>& gaps);
nlohmann::json to_json(const ExampleRecord& record);
// Serializes with every double at 17 significant digits.
std::string dump_json(const nlohmann::json& doc);

}  // namespace ratdyn
