#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace basisrisk {

struct EventRecord {
  std::string country;
  int year = 0;
  std::optional<double> affected;  // missing allowed, routed by majority rule
  double damage = 0.0;             // strictly positive
};

struct LoadReport {
  std::vector<EventRecord> records;
  std::int64_t n_dropped = 0;  // missing / non-positive damage or bad year
};

// Expects columns country, year, affected, damage_usd.
LoadReport load_events(const std::filesystem::path& path);

struct DeflationCoefficients {
  double a = 0.0;
  double b = 0.0;
};

// Fits log(yearly mean damage) = a + b * year by least squares and scales
// every damage by exp(-a - b * year), in place.
DeflationCoefficients deflate(std::vector<EventRecord>& records);

struct TreeHyper {
  int max_depth = 6;
  int min_leaf = 10;

  void validate() const;
};

class RegressionTree {
 public:
  double predict(const EventRecord& record) const;

  int depth() const;
  std::int64_t leaf_count() const;

  friend RegressionTree fit_tree(const std::vector<EventRecord>& train,
                                 const TreeHyper& hyper);

 private:
  struct Node {
    double prediction = 0.0;
    bool is_leaf = true;
    bool numeric = false;        // threshold split on affected
    double threshold = 0.0;
    std::vector<std::string> left_categories;  // sorted, for country splits
    bool majority_left = true;   // fallback for missing / unseen values
    int left = -1;
    int right = -1;
  };

  bool goes_left(const Node& node, const EventRecord& record) const;

  std::vector<Node> nodes_;
};

RegressionTree fit_tree(const std::vector<EventRecord>& train,
                        const TreeHyper& hyper);

struct CvCase {
  std::int64_t record_id = 0;  // index into the input records
  int fold = 0;
  double actual = 0.0;
  double predicted = 0.0;
  double sq_error = 0.0;
};

struct CvReport {
  std::vector<CvCase> cases;  // in input order, one per record
  std::vector<std::int64_t> fold_sizes;
  double rmse = 0.0;
};

CvReport kfold_cv(const std::vector<EventRecord>& records, int k,
                  std::uint64_t seed, const TreeHyper& hyper);

struct DecileRow {
  double damage_lower = 0.0;
  double damage_upper = 0.0;
  double rmse = 0.0;
  std::int64_t n = 0;
};

// Cases sorted by actual damage and cut into 10 equal-count classes.
std::vector<DecileRow> rmse_by_decile(const CvReport& report);

}  // namespace basisrisk
