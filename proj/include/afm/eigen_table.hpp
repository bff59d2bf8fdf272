#pragma once

// A table of eigenvalues keyed by (n, l), with where each value came from.

#include <iosfwd>
#include <optional>
#include <vector>

#include "afm/potentials.hpp"

namespace afm {

enum class Provenance { Numeric, AfmClosedForm, AfmGeneric };

std::string_view to_string(Provenance provenance);
Provenance provenance_from_string(std::string_view name);

struct EigenEntry {
  Family family = Family::PurePower;
  std::optional<double> beta;  // empty for problems given in physical units
  Formulation formulation = Formulation::Epsilon;
  QuantumNumbers q{0, 0};
  double energy = 0.0;
  Provenance provenance = Provenance::Numeric;
  double accuracy = 0.0;  // estimated absolute error; 0 when exact
};

class EigenTable {
 public:
  EigenTable() = default;
  explicit EigenTable(std::vector<EigenEntry> entries);

  void add(EigenEntry entry);

  const std::vector<EigenEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  const EigenEntry* find(const QuantumNumbers& q) const;
  /// Throws IncompleteTable when (n, l) is missing.
  double energy(const QuantumNumbers& q) const;

 private:
  std::vector<EigenEntry> entries_;
};

inline constexpr const char* kCsvHeader =
    "family,beta,formulation,n,l,energy,provenance,accuracy";

/// One header line then one row per entry; `digits` significant digits.
void write_csv(std::ostream& out, const EigenTable& table, int digits = 6);
EigenTable read_csv(std::istream& in);

}  // namespace afm
