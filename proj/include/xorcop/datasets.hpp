#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "xorcop/copula.hpp"
#include "xorcop/linalg.hpp"

namespace xorcop {

/// One row of a dataset: input vector and one value per target column.
struct Sample {
  std::vector<double> inputs;
  std::vector<double> targets;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Named table of samples with inputs and targets in [0, 1].
///
/// Most datasets carry a single target column; validation sets such as the
/// out-sample copula table carry several, and consumers pick one with
/// `target_column`.
class Dataset {
public:
  Dataset(std::string name, std::vector<std::string> input_names,
          std::vector<std::string> target_names, std::vector<Sample> samples);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& input_names() const noexcept { return input_names_; }
  const std::vector<std::string>& target_names() const noexcept { return target_names_; }
  const std::vector<Sample>& samples() const noexcept { return samples_; }

  std::size_t size() const noexcept { return samples_.size(); }
  std::size_t input_arity() const noexcept { return input_names_.size(); }
  std::size_t target_count() const noexcept { return target_names_.size(); }

  /// Index of a target column by name; throws LookupError.
  std::size_t target_column(const std::string& name) const;

  /// Copy keeping only target column `column`.
  Dataset select_target(std::size_t column) const;

  /// Free-form provenance note, e.g. which rows were reconstructed.
  const std::string& note() const noexcept { return note_; }
  void set_note(std::string note) { note_ = std::move(note); }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.name_ == b.name_ && a.input_names_ == b.input_names_ &&
           a.target_names_ == b.target_names_ && a.samples_ == b.samples_;
  }

private:
  std::string name_;
  std::vector<std::string> input_names_;
  std::vector<std::string> target_names_;
  std::vector<Sample> samples_;
  std::string note_;
};

/// Names accepted by builtin(), in registry order.
const std::vector<std::string>& builtin_names();

/// Returns a table from the reference material. Throws LookupError listing
/// the known names.
Dataset builtin(const std::string& name);

/// xor targets F_s(x1, x2) at the given points.
Dataset synth_copula(CopulaParam s, const std::vector<std::pair<double, double>>& points);

/// xor targets F_s on a steps x steps lattice over [0, 1]^2 (x1-major).
Dataset synth_copula(CopulaParam s, std::size_t steps);

/// Names accepted by baseline().
const std::vector<std::string>& baseline_names();

/// Candidate xor approximations (Fa..Fe, Fg), the and/or regression
/// discriminants Rand/Ror, and their 0.5-threshold roundings outAnd/outOr.
/// Throws LookupError.
double baseline(const std::string& name, double x1, double x2);

/// Header: input names, then `target` (single column) or `target_<name>`.
/// Values are written with 17 significant digits.
void emit_csv(const Dataset& data, std::ostream& out);
void emit_csv(const Dataset& data, const std::filesystem::path& path);

/// Inverse of emit_csv. The dataset is named after the file stem.
/// Throws ParseError (with 1-based line) on malformed rows and DomainError
/// (with line) on values outside [0, 1].
Dataset load_csv(std::istream& in, const std::string& name);
Dataset load_csv(const std::filesystem::path& path);

/// Builtin name or CSV path.
Dataset resolve_dataset(const std::string& name_or_path);

/// Regression layout for least_squares: (k+1) x n inputs with a bias row,
/// and the 1 x n target row for column `target`. With `product_feature`
/// an x1*x2 row is inserted before the bias (requires two inputs).
std::pair<Matrix, Matrix> regression_arrays(const Dataset& data, std::size_t target = 0,
                                            bool product_feature = false);

}  // namespace xorcop
