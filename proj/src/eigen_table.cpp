#include "afm/eigen_table.hpp"

#include <charconv>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "afm/error.hpp"

namespace afm {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error("eigen_table", code, message);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::Parse, std::string("bad ") + what + ": '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, const char* what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::Parse, std::string("bad ") + what + ": '" + s + "'");
  }
  return v;
}

}  // namespace

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::Numeric: return "numeric";
    case Provenance::AfmClosedForm: return "afm-closed-form";
    case Provenance::AfmGeneric: return "afm-generic";
  }
  return "numeric";
}

Provenance provenance_from_string(std::string_view name) {
  if (name == "numeric") return Provenance::Numeric;
  if (name == "afm-closed-form") return Provenance::AfmClosedForm;
  if (name == "afm-generic") return Provenance::AfmGeneric;
  fail(ErrorCode::Parse, "unknown provenance '" + std::string(name) + "'");
}

EigenTable::EigenTable(std::vector<EigenEntry> entries) {
  for (auto& e : entries) add(std::move(e));
}

void EigenTable::add(EigenEntry entry) {
  for (auto& e : entries_) {
    if (e.q == entry.q) {
      e = std::move(entry);
      return;
    }
  }
  entries_.push_back(std::move(entry));
}

const EigenEntry* EigenTable::find(const QuantumNumbers& q) const {
  for (const auto& e : entries_) {
    if (e.q == q) return &e;
  }
  return nullptr;
}

double EigenTable::energy(const QuantumNumbers& q) const {
  if (const EigenEntry* e = find(q)) return e->energy;
  fail(ErrorCode::IncompleteTable,
       "no level (n=" + std::to_string(q.n()) + ", l=" + std::to_string(q.l()) + ")");
}

void write_csv(std::ostream& out, const EigenTable& table, int digits) {
  out << kCsvHeader << '\n';
  std::ostringstream row;
  row << std::setprecision(digits);
  for (const auto& e : table.entries()) {
    row.str("");
    row << to_string(e.family) << ',';
    if (e.beta) row << *e.beta;
    row << ',' << to_string(e.formulation) << ',' << e.q.n() << ',' << e.q.l() << ','
        << e.energy << ',' << to_string(e.provenance) << ',' << std::setprecision(3)
        << e.accuracy << std::setprecision(digits);
    out << row.str() << '\n';
  }
}

EigenTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    fail(ErrorCode::Parse, "missing or unexpected CSV header");
  }
  EigenTable table;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 8) {
      fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected 8 columns");
    }
    EigenEntry e;
    e.family = family_from_string(cells[0]);
    if (!cells[1].empty()) e.beta = parse_double(cells[1], "beta");
    e.formulation = formulation_from_string(cells[2]);
    e.q = QuantumNumbers(parse_int(cells[3], "n"), parse_int(cells[4], "l"));
    e.energy = parse_double(cells[5], "energy");
    e.provenance = provenance_from_string(cells[6]);
    e.accuracy = parse_double(cells[7], "accuracy");
    table.add(std::move(e));
  }
  return table;
}

}  // namespace afm
