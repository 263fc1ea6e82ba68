#include "snconic/dataset_io.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace snconic::io {

namespace {

std::vector<double> parse_row(const std::string& line, const std::string& path) {
  std::vector<double> out;
  const char* s = line.c_str();
  while (true) {
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s) throw std::runtime_error(path + ": cannot parse '" + line + "'");
    out.push_back(v);
    s = end;
    while (*s == ' ' || *s == '\t') ++s;
    if (*s == '\0' || *s == '\r') break;
    if (*s != ',') throw std::runtime_error(path + ": expected ',' in '" + line + "'");
    ++s;
  }
  return out;
}

bool looks_like_header(const std::string& line) {
  for (char c : line)
    if (std::isalpha(static_cast<unsigned char>(c)) && c != 'e' && c != 'E') return true;
  return false;
}

RealMatrix read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (first && looks_like_header(line)) {
      first = false;
      continue;
    }
    first = false;
    rows.push_back(parse_row(line, path));
    if (rows.size() > 1 && rows.back().size() != rows.front().size())
      throw std::runtime_error(path + ": ragged rows");
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");
  RealMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void write_row(std::ofstream& out, const Eigen::Ref<const RealVector>& row) {
  char buf[64];
  for (Index j = 0; j < row.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", row[j]);
    out << (j ? "," : "") << buf;
  }
  out << "\n";
}

}  // namespace

Dataset read_dataset_csv(const std::string& data_path, const std::string& mask_path) {
  const RealMatrix table = read_numeric_csv(data_path);
  if (table.cols() < 2) throw std::runtime_error(data_path + ": need y plus at least one column");
  Dataset dataset;
  dataset.y = table.col(0);
  dataset.Z = table.rightCols(table.cols() - 1);
  if (!mask_path.empty()) {
    dataset.mask = read_numeric_csv(mask_path);
    dataset.provenance = Provenance::MissingAtRandom;
  }
  dataset.validate();
  return dataset;
}

void write_dataset_csv(const Dataset& dataset, const std::string& data_path,
                       const std::string& mask_path) {
  dataset.validate();
  std::ofstream out(data_path);
  if (!out) throw std::runtime_error("cannot write " + data_path);
  out << "y";
  for (Index j = 1; j <= dataset.p(); ++j) out << ",z" << j;
  out << "\n";
  RealVector row(dataset.p() + 1);
  for (Index i = 0; i < dataset.n(); ++i) {
    row[0] = dataset.y[i];
    row.tail(dataset.p()) = dataset.Z.row(i);
    write_row(out, row);
  }
  if (!out) throw std::runtime_error("write failed for " + data_path);
  if (!mask_path.empty()) {
    if (!dataset.mask) throw std::runtime_error("dataset has no mask to write");
    std::ofstream mout(mask_path);
    if (!mout) throw std::runtime_error("cannot write " + mask_path);
    for (Index j = 1; j <= dataset.p(); ++j) mout << (j > 1 ? "," : "") << "z" << j;
    mout << "\n";
    for (Index i = 0; i < dataset.mask->rows(); ++i) write_row(mout, dataset.mask->row(i));
    if (!mout) throw std::runtime_error("write failed for " + mask_path);
  }
}

RealMatrix read_matrix_csv(const std::string& path) { return read_numeric_csv(path); }

void write_matrix_csv(const RealMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (Index j = 1; j <= m.cols(); ++j) out << (j > 1 ? "," : "") << "c" << j;
  out << "\n";
  for (Index i = 0; i < m.rows(); ++i) write_row(out, m.row(i));
  if (!out) throw std::runtime_error("write failed for " + path);
}

GammaEstimate read_gamma_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  in >> j;
  GammaEstimate gamma;
  const auto diag = j.at("diag").get<std::vector<double>>();
  gamma.diag = Eigen::Map<const RealVector>(diag.data(), static_cast<Index>(diag.size()));
  gamma.b_eps = j.value("b_eps", 0.0);
  gamma.eps = j.value("eps", 0.05);
  gamma.validate();
  return gamma;
}

void write_gamma_json(const GammaEstimate& gamma, const std::string& path) {
  gamma.validate();
  nlohmann::json j;
  j["diag"] = std::vector<double>(gamma.diag.data(), gamma.diag.data() + gamma.diag.size());
  j["b_eps"] = gamma.b_eps;
  j["eps"] = gamma.eps;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace snconic::io
