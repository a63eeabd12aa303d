#include "basisrisk/flood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include "basisrisk/io.hpp"
#include "basisrisk/rng.hpp"

namespace basisrisk {

namespace {

std::optional<double> parse_double(const std::string& field) {
  if (field.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double value = std::stod(field, &used);
    if (used != field.size() || !std::isfinite(value)) return std::nullopt;
    return value;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Sum of squared deviations from the mean, via sums; the pieces are
// accumulated in split scans where only (n, sum, sumsq) are at hand.
double sse_of(std::int64_t n, double sum, double sumsq) {
  if (n == 0) return 0.0;
  const double value = sumsq - sum * sum / static_cast<double>(n);
  return std::max(value, 0.0);
}

struct SplitChoice {
  bool found = false;
  double sse = std::numeric_limits<double>::infinity();
  bool numeric = false;
  double threshold = 0.0;
  std::vector<std::string> left_categories;
  bool majority_left = true;
};

}  // namespace

LoadReport load_events(const std::filesystem::path& path) {
  const CsvFile csv = read_csv(path);
  const std::vector<std::string> required = {"country", "year", "affected",
                                             "damage_usd"};
  std::vector<std::size_t> index;
  for (const std::string& column : required) {
    const auto it =
        std::find(csv.columns.begin(), csv.columns.end(), column);
    if (it == csv.columns.end())
      throw std::invalid_argument("input is missing column '" + column + "'");
    index.push_back(
        static_cast<std::size_t>(it - csv.columns.begin()));
  }

  LoadReport report;
  report.records.reserve(csv.rows.size());
  for (const auto& row : csv.rows) {
    EventRecord record;
    record.country = row[index[0]];
    const std::optional<double> year = parse_double(row[index[1]]);
    const std::optional<double> damage = parse_double(row[index[3]]);
    if (!year || *year < 1900 || *year > 2100 || !damage || *damage <= 0.0) {
      ++report.n_dropped;
      continue;
    }
    record.year = static_cast<int>(*year);
    record.affected = parse_double(row[index[2]]);
    record.damage = *damage;
    report.records.push_back(std::move(record));
  }
  return report;
}

DeflationCoefficients deflate(std::vector<EventRecord>& records) {
  std::map<int, std::pair<double, std::int64_t>> by_year;
  for (const EventRecord& record : records) {
    auto& [sum, count] = by_year[record.year];
    sum += record.damage;
    ++count;
  }
  if (by_year.size() < 2)
    throw std::invalid_argument(
        "deflation needs at least two distinct years");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [year, acc] : by_year) {
    const double x = static_cast<double>(year);
    const double y = std::log(acc.first / static_cast<double>(acc.second));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(by_year.size());
  DeflationCoefficients coef;
  coef.b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  coef.a = (sy - coef.b * sx) / n;

  for (EventRecord& record : records)
    record.damage *= std::exp(-coef.a - coef.b * record.year);
  return coef;
}

void TreeHyper::validate() const {
  if (max_depth < 0) throw std::domain_error("max_depth must be >= 0");
  if (min_leaf < 1) throw std::domain_error("min_leaf must be >= 1");
}

namespace {

SplitChoice best_numeric_split(const std::vector<EventRecord>& records,
                               const std::vector<std::int64_t>& idx,
                               int min_leaf) {
  std::vector<std::int64_t> present;
  double missing_sum = 0.0, missing_sumsq = 0.0;
  std::int64_t missing_n = 0;
  for (std::int64_t i : idx) {
    if (records[static_cast<std::size_t>(i)].affected) {
      present.push_back(i);
    } else {
      const double d = records[static_cast<std::size_t>(i)].damage;
      missing_sum += d;
      missing_sumsq += d * d;
      ++missing_n;
    }
  }
  SplitChoice best;
  if (present.size() < 2) return best;
  std::sort(present.begin(), present.end(),
            [&](std::int64_t a, std::int64_t b) {
              return *records[static_cast<std::size_t>(a)].affected <
                     *records[static_cast<std::size_t>(b)].affected;
            });

  double total_sum = missing_sum, total_sumsq = missing_sumsq;
  for (std::int64_t i : present) {
    const double d = records[static_cast<std::size_t>(i)].damage;
    total_sum += d;
    total_sumsq += d * d;
  }

  double left_sum = 0.0, left_sumsq = 0.0;
  for (std::size_t pos = 0; pos + 1 < present.size(); ++pos) {
    const EventRecord& here =
        records[static_cast<std::size_t>(present[pos])];
    const EventRecord& next =
        records[static_cast<std::size_t>(present[pos + 1])];
    left_sum += here.damage;
    left_sumsq += here.damage * here.damage;
    if (*here.affected == *next.affected) continue;

    const auto left_n = static_cast<std::int64_t>(pos) + 1;
    const auto right_n = static_cast<std::int64_t>(present.size()) - left_n;
    const bool majority_left = left_n >= right_n;
    const std::int64_t final_left = left_n + (majority_left ? missing_n : 0);
    const std::int64_t final_right = right_n + (majority_left ? 0 : missing_n);
    if (final_left < min_leaf || final_right < min_leaf) continue;

    double l_sum = left_sum, l_sumsq = left_sumsq;
    double r_sum = total_sum - missing_sum - left_sum;
    double r_sumsq = total_sumsq - missing_sumsq - left_sumsq;
    if (majority_left) {
      l_sum += missing_sum;
      l_sumsq += missing_sumsq;
    } else {
      r_sum += missing_sum;
      r_sumsq += missing_sumsq;
    }
    const double sse = sse_of(final_left, l_sum, l_sumsq) +
                       sse_of(final_right, r_sum, r_sumsq);
    if (sse < best.sse) {
      best.found = true;
      best.sse = sse;
      best.numeric = true;
      best.threshold = 0.5 * (*here.affected + *next.affected);
      best.majority_left = majority_left;
    }
  }
  return best;
}

SplitChoice best_categorical_split(const std::vector<EventRecord>& records,
                                   const std::vector<std::int64_t>& idx,
                                   int min_leaf) {
  struct Group {
    double sum = 0.0;
    double sumsq = 0.0;
    std::int64_t n = 0;
  };
  std::map<std::string, Group> groups;
  for (std::int64_t i : idx) {
    const EventRecord& record = records[static_cast<std::size_t>(i)];
    Group& g = groups[record.country];
    g.sum += record.damage;
    g.sumsq += record.damage * record.damage;
    ++g.n;
  }
  SplitChoice best;
  if (groups.size() < 2) return best;

  // Ordering categories by mean response makes the prefix scan exact for a
  // single numeric response.
  std::vector<std::pair<std::string, Group>> ordered(groups.begin(),
                                                     groups.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) {
              const double ma = a.second.sum / static_cast<double>(a.second.n);
              const double mb = b.second.sum / static_cast<double>(b.second.n);
              return ma != mb ? ma < mb : a.first < b.first;
            });

  double total_sum = 0.0, total_sumsq = 0.0;
  std::int64_t total_n = 0;
  for (const auto& [name, g] : ordered) {
    total_sum += g.sum;
    total_sumsq += g.sumsq;
    total_n += g.n;
  }

  double left_sum = 0.0, left_sumsq = 0.0;
  std::int64_t left_n = 0;
  for (std::size_t cut = 0; cut + 1 < ordered.size(); ++cut) {
    left_sum += ordered[cut].second.sum;
    left_sumsq += ordered[cut].second.sumsq;
    left_n += ordered[cut].second.n;
    const std::int64_t right_n = total_n - left_n;
    if (left_n < min_leaf || right_n < min_leaf) continue;
    const double sse =
        sse_of(left_n, left_sum, left_sumsq) +
        sse_of(right_n, total_sum - left_sum, total_sumsq - left_sumsq);
    if (sse < best.sse) {
      best.found = true;
      best.sse = sse;
      best.numeric = false;
      best.left_categories.clear();
      for (std::size_t j = 0; j <= cut; ++j)
        best.left_categories.push_back(ordered[j].first);
      best.majority_left = left_n >= right_n;
    }
  }
  std::sort(best.left_categories.begin(), best.left_categories.end());
  return best;
}

}  // namespace

bool RegressionTree::goes_left(const Node& node,
                               const EventRecord& record) const {
  if (node.numeric) {
    if (!record.affected) return node.majority_left;
    return *record.affected <= node.threshold;
  }
  // Categories outside the stored left set (including unseen ones) go right.
  return std::binary_search(node.left_categories.begin(),
                            node.left_categories.end(), record.country);
}

double RegressionTree::predict(const EventRecord& record) const {
  int at = 0;
  while (!nodes_[static_cast<std::size_t>(at)].is_leaf) {
    const Node& node = nodes_[static_cast<std::size_t>(at)];
    at = goes_left(node, record) ? node.left : node.right;
  }
  return nodes_[static_cast<std::size_t>(at)].prediction;
}

int RegressionTree::depth() const {
  std::vector<std::pair<int, int>> stack = {{0, 0}};
  int deepest = 0;
  while (!stack.empty()) {
    const auto [at, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const Node& node = nodes_[static_cast<std::size_t>(at)];
    if (!node.is_leaf) {
      stack.push_back({node.left, d + 1});
      stack.push_back({node.right, d + 1});
    }
  }
  return deepest;
}

std::int64_t RegressionTree::leaf_count() const {
  std::int64_t leaves = 0;
  for (const Node& node : nodes_)
    if (node.is_leaf) ++leaves;
  return leaves;
}

RegressionTree fit_tree(const std::vector<EventRecord>& train,
                        const TreeHyper& hyper) {
  hyper.validate();
  if (train.empty())
    throw std::invalid_argument("fit_tree needs a nonempty training set");

  RegressionTree tree;
  struct Job {
    int node = 0;
    std::vector<std::int64_t> idx;
    int depth = 0;
  };
  std::vector<Job> jobs;
  {
    std::vector<std::int64_t> all(train.size());
    for (std::size_t i = 0; i < train.size(); ++i)
      all[i] = static_cast<std::int64_t>(i);
    tree.nodes_.emplace_back();
    jobs.push_back({0, std::move(all), 0});
  }

  while (!jobs.empty()) {
    Job job = std::move(jobs.back());
    jobs.pop_back();

    double sum = 0.0;
    for (std::int64_t i : job.idx)
      sum += train[static_cast<std::size_t>(i)].damage;
    const auto n = static_cast<std::int64_t>(job.idx.size());
    tree.nodes_[static_cast<std::size_t>(job.node)].prediction =
        sum / static_cast<double>(n);

    if (job.depth >= hyper.max_depth || n < 2 * hyper.min_leaf) continue;

    SplitChoice numeric = best_numeric_split(train, job.idx, hyper.min_leaf);
    SplitChoice categorical =
        best_categorical_split(train, job.idx, hyper.min_leaf);
    SplitChoice& best = numeric.sse <= categorical.sse ? numeric : categorical;
    if (!best.found) continue;

    double node_sum = 0.0, node_sumsq = 0.0;
    for (std::int64_t i : job.idx) {
      const double d = train[static_cast<std::size_t>(i)].damage;
      node_sum += d;
      node_sumsq += d * d;
    }
    if (!(best.sse < sse_of(n, node_sum, node_sumsq))) continue;

    RegressionTree::Node& node = tree.nodes_[static_cast<std::size_t>(job.node)];
    node.is_leaf = false;
    node.numeric = best.numeric;
    node.threshold = best.threshold;
    node.left_categories = std::move(best.left_categories);
    node.majority_left = best.majority_left;
    node.left = static_cast<int>(tree.nodes_.size());
    node.right = node.left + 1;
    tree.nodes_.emplace_back();
    tree.nodes_.emplace_back();

    Job left_job{node.left, {}, job.depth + 1};
    Job right_job{node.right, {}, job.depth + 1};
    const RegressionTree::Node& fixed =
        tree.nodes_[static_cast<std::size_t>(job.node)];
    for (std::int64_t i : job.idx) {
      if (tree.goes_left(fixed, train[static_cast<std::size_t>(i)]))
        left_job.idx.push_back(i);
      else
        right_job.idx.push_back(i);
    }
    jobs.push_back(std::move(left_job));
    jobs.push_back(std::move(right_job));
  }
  return tree;
}

CvReport kfold_cv(const std::vector<EventRecord>& records, int k,
                  std::uint64_t seed, const TreeHyper& hyper) {
  hyper.validate();
  const auto n = static_cast<std::int64_t>(records.size());
  if (k < 2) throw std::domain_error("k must be at least 2");
  if (n < k) throw std::domain_error("need at least k records");

  std::vector<std::int64_t> order(records.size());
  for (std::size_t i = 0; i < records.size(); ++i)
    order[i] = static_cast<std::int64_t>(i);
  Rng rng(seed, 0);
  for (std::int64_t i = n - 1; i > 0; --i) {
    const auto j =
        static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(j)]);
  }

  std::vector<int> fold_of(records.size());
  CvReport report;
  report.fold_sizes.assign(static_cast<std::size_t>(k), 0);
  for (std::int64_t pos = 0; pos < n; ++pos) {
    const int fold = static_cast<int>(pos % k);
    fold_of[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] =
        fold;
    ++report.fold_sizes[static_cast<std::size_t>(fold)];
  }

  report.cases.resize(records.size());
  double total_sq = 0.0;
  for (int fold = 0; fold < k; ++fold) {
    std::vector<EventRecord> train;
    train.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
      if (fold_of[i] != fold) train.push_back(records[i]);
    const RegressionTree tree = fit_tree(train, hyper);
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (fold_of[i] != fold) continue;
      CvCase& out = report.cases[i];
      out.record_id = static_cast<std::int64_t>(i);
      out.fold = fold;
      out.actual = records[i].damage;
      out.predicted = tree.predict(records[i]);
      const double err = out.actual - out.predicted;
      out.sq_error = err * err;
      total_sq += out.sq_error;
    }
  }
  report.rmse = std::sqrt(total_sq / static_cast<double>(n));
  return report;
}

std::vector<DecileRow> rmse_by_decile(const CvReport& report) {
  if (report.cases.empty())
    throw std::invalid_argument("empty cross-validation report");
  std::vector<const CvCase*> sorted;
  sorted.reserve(report.cases.size());
  for (const CvCase& c : report.cases) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(), [](const CvCase* a, const CvCase* b) {
    return a->actual != b->actual ? a->actual < b->actual
                                  : a->record_id < b->record_id;
  });

  const auto n = static_cast<std::int64_t>(sorted.size());
  const std::int64_t classes = std::min<std::int64_t>(10, n);
  std::vector<DecileRow> rows;
  std::int64_t at = 0;
  for (std::int64_t c = 0; c < classes; ++c) {
    const std::int64_t size = n / classes + (c < n % classes ? 1 : 0);
    DecileRow row;
    row.n = size;
    row.damage_lower = sorted[static_cast<std::size_t>(at)]->actual;
    row.damage_upper =
        sorted[static_cast<std::size_t>(at + size - 1)]->actual;
    double sq = 0.0;
    for (std::int64_t i = at; i < at + size; ++i)
      sq += sorted[static_cast<std::size_t>(i)]->sq_error;
    row.rmse = std::sqrt(sq / static_cast<double>(size));
    rows.push_back(row);
    at += size;
  }
  return rows;
}

}  // namespace basisrisk
