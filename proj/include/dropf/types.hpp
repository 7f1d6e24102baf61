#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dropf {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// One of the three network phases. Expanded split-phase secondaries reuse
/// the primary phase label as their single synthetic phase.
enum class Phase : uint8_t { A = 0, B = 1, C = 2 };

inline char phase_char(Phase p) { return "abc"[static_cast<int>(p)]; }

/// Ordered subset of {a,b,c}. Canonical order is a < b < c.
class PhaseSet {
public:
  PhaseSet() = default;
  PhaseSet(std::initializer_list<Phase> ps) {
    for (Phase p : ps) add(p);
  }
  static PhaseSet abc() { return PhaseSet{Phase::A, Phase::B, Phase::C}; }
  static PhaseSet single(Phase p) { return PhaseSet{p}; }

  void add(Phase p) { mask_ |= bit(p); }
  bool contains(Phase p) const { return mask_ & bit(p); }
  bool subset_of(const PhaseSet& o) const { return (mask_ & ~o.mask_) == 0; }
  bool empty() const { return mask_ == 0; }
  int size() const { return (mask_ & 1) + ((mask_ >> 1) & 1) + ((mask_ >> 2) & 1); }

  /// Position of phase p in the canonical ordering of this set.
  int index_of(Phase p) const {
    if (!contains(p)) throw std::out_of_range("phase not in set");
    int idx = 0;
    for (int b = 0; b < static_cast<int>(p); ++b)
      if (mask_ & (1u << b)) ++idx;
    return idx;
  }

  std::vector<Phase> list() const {
    std::vector<Phase> out;
    for (int b = 0; b < 3; ++b)
      if (mask_ & (1u << b)) out.push_back(static_cast<Phase>(b));
    return out;
  }

  std::string str() const {
    std::string s;
    for (Phase p : list()) s += phase_char(p);
    return s;
  }

  static PhaseSet parse(const std::string& s) {
    PhaseSet ps;
    for (char c : s) {
      switch (c) {
        case 'a': case 'A': ps.add(Phase::A); break;
        case 'b': case 'B': ps.add(Phase::B); break;
        case 'c': case 'C': ps.add(Phase::C); break;
        default: throw std::invalid_argument("bad phase char '" + std::string(1, c) + "'");
      }
    }
    return ps;
  }

  bool operator==(const PhaseSet& o) const = default;

private:
  static uint8_t bit(Phase p) { return static_cast<uint8_t>(1u << static_cast<int>(p)); }
  uint8_t mask_ = 0;
};

/// Balanced positive-sequence angle of a phase: 0, -2pi/3, +2pi/3.
inline double balanced_angle(Phase p) {
  switch (p) {
    case Phase::A: return 0.0;
    case Phase::B: return -2.0 * kPi / 3.0;
    case Phase::C: return +2.0 * kPi / 3.0;
  }
  return 0.0;
}

/// Unit phasor at the balanced angle of phase p.
inline Complex balanced_phasor(Phase p) {
  return std::polar(1.0, balanced_angle(p));
}

}  // namespace dropf
