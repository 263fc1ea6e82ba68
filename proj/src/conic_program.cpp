#include "snconic/conic_program.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace snconic::solver {

void ConicProgram::validate() const {
  if (num_vars < 1) throw std::invalid_argument("program: num_vars < 1");
  if (objective.size() != num_vars) throw std::invalid_argument("program: objective length != d");
  if (rhs.size() != num_rows) throw std::invalid_argument("program: rhs length != m");
  require_finite(objective, "program objective");
  require_finite(rhs, "program rhs");
  Index total = 0;
  for (const auto& cone : cones) {
    cone.validate();
    total += cone.dim;
  }
  if (total != num_rows) throw std::invalid_argument("program: cone dims do not sum to m");
  for (const auto& t : entries) {
    if (t.row() < 0 || t.row() >= num_rows || t.col() < 0 || t.col() >= num_vars)
      throw std::invalid_argument("program: entry index out of range");
    if (t.value() == 0.0) throw std::invalid_argument("program: explicitly stored zero");
    if (!std::isfinite(t.value())) throw std::invalid_argument("program: non-finite entry");
  }
}

Eigen::SparseMatrix<double> ConicProgram::matrix() const {
  Eigen::SparseMatrix<double> A(num_rows, num_vars);
  A.setFromTriplets(entries.begin(), entries.end());
  return A;
}

namespace {
const char* cone_name(ConeKind k) {
  switch (k) {
    case ConeKind::Zero:
      return "zero";
    case ConeKind::NonNeg:
      return "nonneg";
    case ConeKind::SecondOrder:
      return "soc";
  }
  return "?";
}

ConeKind cone_from_name(const std::string& s) {
  if (s == "zero") return ConeKind::Zero;
  if (s == "nonneg") return ConeKind::NonNeg;
  if (s == "soc") return ConeKind::SecondOrder;
  throw std::runtime_error("program file: unknown cone kind '" + s + "'");
}
}  // namespace

void write_program_file(const ConicProgram& program, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  char buf[64];
  out << "socp 1\n";
  out << "d " << program.num_vars << "\n";
  out << "m " << program.num_rows << "\n";
  for (Index i = 0; i < program.objective.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", program.objective[i]);
    out << "c " << i << " " << buf << "\n";
  }
  for (const auto& t : program.entries) {
    std::snprintf(buf, sizeof buf, "%.17g", t.value());
    out << "A " << t.row() << " " << t.col() << " " << buf << "\n";
  }
  for (Index i = 0; i < program.rhs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", program.rhs[i]);
    out << "b " << i << " " << buf << "\n";
  }
  for (const auto& cone : program.cones)
    out << "cone " << cone_name(cone.kind) << " " << cone.dim << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

ConicProgram read_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "socp" || version != 1)
    throw std::runtime_error("program file: bad header in " + path);
  ConicProgram program;
  bool have_d = false, have_m = false;
  std::string line;
  std::getline(in, line);  // rest of header line
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string rec;
    ls >> rec;
    if (rec == "d") {
      ls >> program.num_vars;
      program.objective = RealVector::Zero(program.num_vars);
      have_d = true;
    } else if (rec == "m") {
      ls >> program.num_rows;
      program.rhs = RealVector::Zero(program.num_rows);
      have_m = true;
    } else if (rec == "c") {
      Index i;
      double v;
      if (!have_d || !(ls >> i >> v)) throw std::runtime_error("program file: bad c record");
      program.objective[i] = v;
    } else if (rec == "A") {
      Index r, c;
      double v;
      if (!(ls >> r >> c >> v)) throw std::runtime_error("program file: bad A record");
      program.entries.emplace_back(r, c, v);
    } else if (rec == "b") {
      Index i;
      double v;
      if (!have_m || !(ls >> i >> v)) throw std::runtime_error("program file: bad b record");
      program.rhs[i] = v;
    } else if (rec == "cone") {
      std::string kind;
      Index dim;
      if (!(ls >> kind >> dim)) throw std::runtime_error("program file: bad cone record");
      program.cones.push_back({cone_from_name(kind), dim});
    } else {
      throw std::runtime_error("program file: unknown record '" + rec + "'");
    }
  }
  program.validate();
  return program;
}

}  // namespace snconic::solver
