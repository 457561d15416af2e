#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eqgh {

/// A single failed axiom, with the indices that witness it.
struct Violation {
  enum class Kind {
    NotSquare,
    BasepointOutOfRange,
    NonZeroDiagonal,
    AsymmetricMatrix,
    NegativeDistance,
    TriangleViolation,
    DuplicatePoint,
    EntryOutOfRange,
    NoIdentity,
    NoInverse,
    NotAssociative,
    NotPermutation,
    NotIsometric,
    NotHomomorphic,
    NotEffective,
  };

  Kind kind;
  std::vector<std::size_t> where;

  bool operator==(const Violation&) const = default;
};

inline const char* to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::NotSquare: return "NotSquare";
    case Violation::Kind::BasepointOutOfRange: return "BasepointOutOfRange";
    case Violation::Kind::NonZeroDiagonal: return "NonZeroDiagonal";
    case Violation::Kind::AsymmetricMatrix: return "AsymmetricMatrix";
    case Violation::Kind::NegativeDistance: return "NegativeDistance";
    case Violation::Kind::TriangleViolation: return "TriangleViolation";
    case Violation::Kind::DuplicatePoint: return "DuplicatePoint";
    case Violation::Kind::EntryOutOfRange: return "EntryOutOfRange";
    case Violation::Kind::NoIdentity: return "NoIdentity";
    case Violation::Kind::NoInverse: return "NoInverse";
    case Violation::Kind::NotAssociative: return "NotAssociative";
    case Violation::Kind::NotPermutation: return "NotPermutation";
    case Violation::Kind::NotIsometric: return "NotIsometric";
    case Violation::Kind::NotHomomorphic: return "NotHomomorphic";
    case Violation::Kind::NotEffective: return "NotEffective";
  }
  return "Unknown";
}

inline std::string describe(const Violation& v) {
  std::ostringstream os;
  os << to_string(v.kind) << '(';
  for (std::size_t i = 0; i < v.where.size(); ++i) {
    if (i) os << ',';
    os << v.where[i];
  }
  os << ')';
  return os.str();
}

/// Thrown by the validate_* entry points. Carries every violation found
/// (triangle violations are capped, see metric_space.hpp).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : std::invalid_argument(summarize(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

  bool has(Violation::Kind kind) const {
    for (const auto& v : violations_)
      if (v.kind == kind) return true;
    return false;
  }

 private:
  static std::string summarize(const std::vector<Violation>& vs) {
    std::string out = "validation failed:";
    for (std::size_t i = 0; i < vs.size() && i < 8; ++i) out += " " + describe(vs[i]);
    if (vs.size() > 8) out += " ...";
    return out;
  }

  std::vector<Violation> violations_;
};

class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuotientNotMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedTriple : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoApproximationBelow : public std::runtime_error {
 public:
  explicit NoApproximationBelow(double eps_max)
      : std::runtime_error("no approximation at or below epsilon " + std::to_string(eps_max)),
        eps_max_(eps_max) {}
  double eps_max() const noexcept { return eps_max_; }

 private:
  double eps_max_;
};

class NotASubgroup : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PointsTooSpread : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoCoverage : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NetIncompatible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoHomomorphismNearby : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DefectTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotARotation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DivisibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace eqgh
