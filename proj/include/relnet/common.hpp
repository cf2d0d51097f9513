#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace relnet {

// Raised for malformed or missing input data (files, records, vocabularies).
// The CLI maps this to exit code 2; everything else unexpected maps to 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Deterministic RNG.
//
// All randomness in the toolkit flows from one root seed, expanded per
// purpose with splitmix64 so that independent consumers (init, shuffle,
// dropout, smo, ...) never share a stream. The generator below is xoshiro-free
// on purpose: splitmix64 itself is a fine generator for our needs and its
// output is identical on every platform and standard library.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so that small seeds do not produce correlated first draws.
    splitmix64(state_);
    splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t next_below(std::uint64_t n) {
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Derives a purpose-specific seed from the root seed. `purpose` is any short
// tag ("init", "shuffle", "dropout", "smo", ...); `index` distinguishes
// repeated uses such as grid-search runs.
std::uint64_t derive_seed(std::uint64_t root, const std::string& purpose, std::uint64_t index = 0);

// ---------------------------------------------------------------------------
// Row-major dense matrix of doubles. Deliberately minimal: the toolkit's
// linear algebra happens through the kernels on raw rows.
// ---------------------------------------------------------------------------

class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void fill(double v) { data_.assign(data_.size(), v); }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

// A named parameter block: values plus a same-shaped gradient accumulator.
// Model components expose their blocks through this type so the optimizer,
// the checkpoint writer and the finite-difference checker all walk the same
// list in the same order.
struct Param {
  std::string name;
  std::vector<double> value;
  std::vector<double> grad;

  Param() = default;
  Param(std::string n, std::size_t size) : name(std::move(n)), value(size, 0.0), grad(size, 0.0) {}

  void zero_grad() { grad.assign(grad.size(), 0.0); }
  std::size_t size() const { return value.size(); }
};

// CRC-32 (IEEE 802.3 polynomial) used by the checkpoint format.
std::uint32_t crc32(const void* data, std::size_t len, std::uint32_t seed = 0);

}  // namespace relnet
