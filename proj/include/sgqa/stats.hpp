#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgqa/question_engine.hpp"

namespace sgqa {

/// Streaming count / sum / sum of squares over non-negative integers.
/// Merging is exact, so sharded and sequential runs agree bit for bit.
class StatsAccumulator {
 public:
  void add(std::uint64_t x);
  void merge(const StatsAccumulator& other);

  std::uint64_t count() const { return n_; }
  double mean() const;
  /// Sample standard deviation (n - 1 denominator); 0 for n < 2.
  double sd() const;

  friend bool operator==(const StatsAccumulator&, const StatsAccumulator&) = default;

 private:
  std::uint64_t n_ = 0;
  UInt128 sum_ = 0;
  UInt128 sumsq_ = 0;
};

struct MeanCI {
  enum class Status { ok, degenerate, undefined };
  std::uint64_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  Status status = Status::undefined;
};

inline constexpr double kZ95 = 1.96;

/// mean ± 1.96·sd/√n. n = 1 is degenerate (zero width); n = 0 is undefined.
MeanCI mean_ci(const StatsAccumulator& acc);

using Histogram = std::map<std::uint64_t, std::uint64_t>;

class CorpusStats {
 public:
  void add(const QuestionRecord& r);
  void merge(const CorpusStats& other);

  std::uint64_t records() const { return hops_.count(); }
  std::uint64_t problematic() const { return problematic_; }
  const StatsAccumulator& hops() const { return hops_; }
  const StatsAccumulator& objects() const { return objects_; }
  const StatsAccumulator& length() const { return length_; }
  const Histogram& hop_histogram() const { return hop_hist_; }
  const Histogram& object_histogram() const { return object_hist_; }
  const std::map<std::string, Histogram>& length_histograms() const { return length_hist_; }
  const std::map<std::string, std::uint64_t>& attribute_counts() const { return attributes_; }
  const std::map<std::string, std::uint64_t>& reasoning_counts() const { return reasoning_; }

  nlohmann::json to_json() const;
  /// Long-format CSV: histogram,group,value,count.
  std::string histograms_csv() const;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;

 private:
  std::uint64_t problematic_ = 0;
  StatsAccumulator hops_, objects_, length_;
  std::map<std::string, StatsAccumulator> length_by_type_;
  Histogram hop_hist_, object_hist_;
  std::map<std::string, Histogram> length_hist_;
  std::map<std::string, std::uint64_t> attributes_, reasoning_;
};

CorpusStats compute_stats(const std::vector<QuestionRecord>& records);

}  // namespace sgqa
