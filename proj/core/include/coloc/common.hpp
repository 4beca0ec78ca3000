#ifndef COLOC_COMMON_HPP
#define COLOC_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coloc {

using TimestampMs = std::int64_t;

inline constexpr TimestampMs kMinuteMs = 60'000;
inline constexpr TimestampMs kHourMs = 60 * kMinuteMs;
inline constexpr TimestampMs kDayMs = 24 * kHourMs;
inline constexpr TimestampMs kWeekMs = 7 * kDayMs;

/// Missing-value marker used in every real-valued series and feature cell.
/// Computations never produce NaN on their own; a NaN always means "no data".
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

// Exit codes shared by the command-line front end.
enum class ExitCode : int {
  kOk = 0,
  kInputContract = 2,
  kMissingArtifact = 3,
  kInvariant = 4,
};

/// Malformed input: bad header, out-of-contract config, mixed artifacts.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An upstream artifact a stage depends on does not exist.
class MissingArtifactError : public std::runtime_error {
 public:
  MissingArtifactError(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// An internal consistency check failed.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

#define COLOC_ENSURE(cond, msg)                                  \
  do {                                                           \
    if (!(cond)) throw ::coloc::InvariantError(std::string(msg)); \
  } while (0)

/// Deterministic random stream. Every consumer derives its own stream from
/// the run seed and a stream name, so adding draws in one place never shifts
/// another component's sequence. Distributions are implemented here rather
/// than taken from <random> so sequences are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}
  Rng(std::uint64_t seed, std::string_view stream);

  /// Child stream keyed by name (and optionally an index).
  Rng derive(std::string_view stream, std::uint64_t index = 0) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  double normal(double mean = 0.0, double sd = 1.0);

  template <class It>
  void shuffle(It first, It last) {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      std::uint64_t j = below(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

/// Shortest text that parses back to the same double; "" for missing.
std::string format_double(double v);
/// Parse a double; empty field yields kMissing. Throws InputError on garbage.
double parse_double(std::string_view s);
std::int64_t parse_int(std::string_view s);

/// Split one CSV record on commas (no quoting; identifiers must not contain commas).
std::vector<std::string_view> split_csv(std::string_view line);
std::string_view trim(std::string_view s);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. jobs <= 1 runs inline.
/// Work items must write to disjoint outputs.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace coloc

#endif  // COLOC_COMMON_HPP
