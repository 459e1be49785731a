#include "kisim/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kisim {

void to_json(nlohmann::json& j, const KickedIsingParams& p) {
  j = nlohmann::json{{"j_z", p.j_z}, {"h_x", p.h_x}, {"h_z", p.h_z}};
}

void from_json(const nlohmann::json& j, KickedIsingParams& p) {
  j.at("j_z").get_to(p.j_z);
  j.at("h_x").get_to(p.h_x);
  j.at("h_z").get_to(p.h_z);
}

void to_json(nlohmann::json& j, const SeriesMeta& m) {
  j = nlohmann::json{{"kind", m.kind},
                     {"params", m.params},
                     {"L", m.L},
                     {"delta", m.delta},
                     {"delta_prime", m.delta_prime},
                     {"symmetrized", m.symmetrized},
                     {"observable", m.observable},
                     {"mode", m.mode},
                     {"n_samples", m.n_samples},
                     {"seed", m.seed},
                     {"values_per_site", m.values_per_site}};
}

void from_json(const nlohmann::json& j, SeriesMeta& m) {
  j.at("kind").get_to(m.kind);
  j.at("params").get_to(m.params);
  j.at("L").get_to(m.L);
  j.at("delta").get_to(m.delta);
  j.at("delta_prime").get_to(m.delta_prime);
  j.at("symmetrized").get_to(m.symmetrized);
  j.at("observable").get_to(m.observable);
  j.at("mode").get_to(m.mode);
  j.at("n_samples").get_to(m.n_samples);
  j.at("seed").get_to(m.seed);
  j.at("values_per_site").get_to(m.values_per_site);
}

namespace io {

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_timeseries_csv(const std::string& path, const TimeSeries& series) {
  nlohmann::json meta = series.meta;
  meta["columns"] = {"t", "re", "im", "abs", "stderr"};
  std::ostringstream out;
  out << "# " << meta.dump() << "\n";
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    const cplx v = series.values[k];
    const double err = k < series.stderrs.size() ? series.stderrs[k] : 0.0;
    out << series.times[k] << ',' << format_double(v.real()) << ','
        << format_double(v.imag()) << ',' << format_double(std::abs(v)) << ','
        << format_double(err) << "\n";
  }
  write_text_file(path, out.str());
}

TimeSeries read_timeseries_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open time-series file: " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line.size() < 2 || line[0] != '#') {
    throw std::runtime_error("missing metadata header in " + path);
  }
  TimeSeries series;
  series.meta = nlohmann::json::parse(line.substr(1)).get<SeriesMeta>();
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    int t = 0;
    double re = 0, im = 0, mag = 0, err = 0;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf", &t, &re, &im, &mag, &err) != 5) {
      throw std::runtime_error("malformed row in " + path + ": " + line);
    }
    series.times.push_back(t);
    series.values.emplace_back(re, im);
    series.stderrs.push_back(err);
  }
  return series;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(std::size_t(len) * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string sha256_hex_file(const std::string& path) {
  return sha256_hex(read_text_file(path));
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open file for writing: " + path);
  }
  out << contents;
  if (!out) {
    throw std::runtime_error("short write to " + path);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace io
}  // namespace kisim
