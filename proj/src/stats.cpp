#include "sgqa/stats.hpp"

#include <cmath>
#include <sstream>

namespace sgqa {

using nlohmann::json;

void StatsAccumulator::add(std::uint64_t x) {
  ++n_;
  sum_ += x;
  sumsq_ += static_cast<UInt128>(x) * x;
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
  n_ += other.n_;
  sum_ += other.sum_;
  sumsq_ += other.sumsq_;
}

double StatsAccumulator::mean() const {
  return n_ == 0 ? 0.0 : static_cast<double>(sum_) / static_cast<double>(n_);
}

double StatsAccumulator::sd() const {
  if (n_ < 2) return 0.0;
  // n·Σx² − (Σx)² is exact in 128 bits for the ranges we count.
  const UInt128 n = n_;
  const UInt128 spread = n * sumsq_ - sum_ * sum_;
  const double var = static_cast<double>(spread) / (static_cast<double>(n_) * static_cast<double>(n_ - 1));
  return std::sqrt(var);
}

MeanCI mean_ci(const StatsAccumulator& acc) {
  MeanCI ci;
  ci.n = acc.count();
  if (ci.n == 0) return ci;
  ci.mean = acc.mean();
  ci.sd = acc.sd();
  const double half = ci.n < 2 ? 0.0 : kZ95 * ci.sd / std::sqrt(static_cast<double>(ci.n));
  ci.lower = ci.mean - half;
  ci.upper = ci.mean + half;
  ci.status = ci.n < 2 ? MeanCI::Status::degenerate : MeanCI::Status::ok;
  return ci;
}

void CorpusStats::add(const QuestionRecord& r) {
  const std::string type(to_string(r.reasoning_type));
  hops_.add(r.n_hops);
  objects_.add(r.n_objects);
  length_.add(r.length_tokens);
  length_by_type_[type].add(r.length_tokens);
  ++hop_hist_[r.n_hops];
  ++object_hist_[r.n_objects];
  ++length_hist_[type][r.length_tokens];
  ++reasoning_[type];
  if (r.attribute) ++attributes_[std::string(to_string(*r.attribute))];
  if (r.is_problematic) ++problematic_;
}

void CorpusStats::merge(const CorpusStats& o) {
  problematic_ += o.problematic_;
  hops_.merge(o.hops_);
  objects_.merge(o.objects_);
  length_.merge(o.length_);
  for (const auto& [k, v] : o.length_by_type_) length_by_type_[k].merge(v);
  for (const auto& [k, v] : o.hop_hist_) hop_hist_[k] += v;
  for (const auto& [k, v] : o.object_hist_) object_hist_[k] += v;
  for (const auto& [type, h] : o.length_hist_) {
    for (const auto& [k, v] : h) length_hist_[type][k] += v;
  }
  for (const auto& [k, v] : o.attributes_) attributes_[k] += v;
  for (const auto& [k, v] : o.reasoning_) reasoning_[k] += v;
}

namespace {

json ci_json(const StatsAccumulator& acc) {
  const MeanCI ci = mean_ci(acc);
  static constexpr const char* kStatus[] = {"ok", "degenerate", "undefined"};
  json j{{"n", ci.n}, {"status", kStatus[static_cast<int>(ci.status)]}};
  if (ci.status == MeanCI::Status::undefined) {
    j["mean"] = nullptr;
    j["sd"] = nullptr;
    j["ci95"] = nullptr;
  } else {
    j["mean"] = ci.mean;
    j["sd"] = ci.sd;
    j["ci95"] = {ci.lower, ci.upper};
  }
  return j;
}

json hist_json(const Histogram& h) {
  json j = json::object();
  for (const auto& [k, v] : h) j[std::to_string(k)] = v;
  return j;
}

}  // namespace

json CorpusStats::to_json() const {
  json by_type = json::object();
  for (const auto& [type, acc] : length_by_type_) by_type[type] = ci_json(acc);
  json length_hists = json::object();
  for (const auto& [type, h] : length_hist_) length_hists[type] = hist_json(h);
  return {{"records", records()},
          {"problematic", problematic_},
          {"hops", ci_json(hops_)},
          {"objects", ci_json(objects_)},
          {"length", ci_json(length_)},
          {"length_by_reasoning_type", std::move(by_type)},
          {"histograms",
           {{"hops", hist_json(hop_hist_)},
            {"objects", hist_json(object_hist_)},
            {"length_by_reasoning_type", std::move(length_hists)}}},
          {"attribute_counts", attributes_},
          {"reasoning_type_counts", reasoning_}};
}

std::string CorpusStats::histograms_csv() const {
  std::ostringstream out;
  out << "histogram,group,value,count\n";
  for (const auto& [k, v] : hop_hist_) out << "hops,all," << k << ',' << v << '\n';
  for (const auto& [k, v] : object_hist_) out << "objects,all," << k << ',' << v << '\n';
  for (const auto& [type, h] : length_hist_) {
    for (const auto& [k, v] : h) out << "length," << type << ',' << k << ',' << v << '\n';
  }
  return out.str();
}

CorpusStats compute_stats(const std::vector<QuestionRecord>& records) {
  CorpusStats s;
  for (const auto& r : records) s.add(r);
  return s;
}

}  // namespace sgqa
