#pragma once

#include <string>

#include <json.hpp>

#include "kisim/dynamics.hpp"
#include "kisim/state.hpp"

namespace kisim {

// ADL hooks so nlohmann::json can (de)serialize core types directly.
void to_json(nlohmann::json& j, const KickedIsingParams& p);
void from_json(const nlohmann::json& j, KickedIsingParams& p);
void to_json(nlohmann::json& j, const SeriesMeta& m);
void from_json(const nlohmann::json& j, SeriesMeta& m);

namespace io {

// Shortest round-trippable decimal form (printf %.17g).
std::string format_double(double value);

// Time-series files are plain CSV prefixed by one comment line holding the
// run metadata as JSON, e.g.
//   # {"kind":"correlation",...,"columns":["t","re","im","abs","stderr"]}
//   0,1,0,1,0
// The comment prefix keeps the file directly loadable by gnuplot and pandas.
void write_timeseries_csv(const std::string& path, const TimeSeries& series);
TimeSeries read_timeseries_csv(const std::string& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_hex_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace io
}  // namespace kisim
