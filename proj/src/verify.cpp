#include "pwc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "pwc/capacity.hpp"
#include "pwc/dp.hpp"
#include "pwc/oracle.hpp"
#include "pwc/patterns.hpp"

namespace pwc {

FirstOrderSpec random_first_order(std::mt19937_64& rng, int depth) {
  std::uniform_real_distribution<double> start(-1.0, 1.0), step(0.0, 1.5);
  std::vector<double> h(static_cast<std::size_t>(depth) + 1);
  h[0] = start(rng);
  for (std::size_t k = 1; k < h.size(); ++k) h[k] = h[k - 1] + step(rng);
  return {HSequence::from_values(std::move(h), "random"), std::nullopt};
}

SecondOrderSpec random_second_order(std::mt19937_64& rng, int depth) {
  std::uniform_real_distribution<double> start(-1.0, 1.0), cell(0.0, 0.8);
  const int rows = depth + 1;
  // prefix[k][l] = base + sum of cells (k', l') with k' <= k, l' <= l, over the full rectangle.
  std::vector<std::vector<double>> prefix(static_cast<std::size_t>(rows) + 1,
                                          std::vector<double>(static_cast<std::size_t>(rows), 0.0));
  const double base = start(rng);
  for (int k = 1; k <= rows; ++k)
    for (int l = 0; l < rows; ++l) {
      const auto uk = static_cast<std::size_t>(k), ul = static_cast<std::size_t>(l);
      double v = cell(rng) + prefix[uk - 1][ul];
      if (l > 0) v += prefix[uk][ul - 1] - prefix[uk - 1][ul - 1];
      prefix[uk][ul] = v;
    }
  std::vector<std::vector<double>> h;
  for (int k = 1; k <= rows; ++k) {
    const auto& row = prefix[static_cast<std::size_t>(k)];
    std::vector<double> r;
    for (int l = 0; l < k; ++l) r.push_back(base + row[static_cast<std::size_t>(l)]);
    h.push_back(std::move(r));
  }
  return {HArray::from_rows(std::move(h), "random"), std::nullopt};
}

CapacitySpec random_capacity(std::mt19937_64& rng, int depth) {
  std::uniform_real_distribution<double> c(0.2, 3.0);
  std::vector<double> values(static_cast<std::size_t>(std::max(depth, 1)));
  for (double& x : values) x = c(rng);
  return {HSequence::from_values(std::move(values), "random")};
}

double log_relative_error(double ln_x, double ln_y) {
  if (ln_x == ln_y) return 0.0;
  if (!std::isfinite(ln_x) || !std::isfinite(ln_y)) return std::numeric_limits<double>::infinity();
  return std::expm1(std::abs(ln_x - ln_y));
}

bool VerifyReport::ok() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.ok(); });
}

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void check_depth_option(const VerifyOptions& opt) {
  if (opt.depth < 1 || opt.depth > kOracleMaxDepth)
    throw std::invalid_argument("verification depth must be in 1.." + std::to_string(kOracleMaxDepth));
  if (opt.draws < 1) throw std::invalid_argument("verification needs at least one draw");
}

ClusteringSpec draw_spec(const std::string& variant, std::mt19937_64& rng, int depth) {
  if (variant == "first") return random_first_order(rng, depth);
  if (variant == "second") return random_second_order(rng, depth);
  if (variant == "capacity") return random_capacity(rng, depth);
  throw std::invalid_argument("unknown variant " + variant);
}

std::string spec_values(const ClusteringSpec& spec, int depth) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* f = std::get_if<FirstOrderSpec>(&spec)) {
    os << "h=[";
    for (int k = 0; k <= depth; ++k) os << (k ? "," : "") << f->h(k);
    os << "]";
  } else if (const auto* s = std::get_if<SecondOrderSpec>(&spec)) {
    os << "h=[";
    for (int k = 1; k <= depth + 1; ++k) {
      os << (k > 1 ? "," : "") << "[";
      for (int l = 0; l < k; ++l) os << (l ? "," : "") << s->h(k, l);
      os << "]";
    }
    os << "]";
  } else if (const auto* c = std::get_if<CapacitySpec>(&spec)) {
    os << "C=[";
    for (int l = 0; l < depth; ++l) os << (l ? "," : "") << c->conductance(l);
    os << "]";
  }
  return os.str();
}

}  // namespace

SuiteResult verify_z_and_w(const std::string& variant, const VerifyOptions& opt) {
  check_depth_option(opt);
  SuiteResult r{"z-w-" + variant, 0, {}};
  std::mt19937_64 rng(opt.seed + variant.size());
  std::uniform_real_distribution<double> jdist(-3.0, 3.0);
  for (int n = 1; n <= opt.depth; ++n) {
    for (int draw = 0; draw < opt.draws; ++draw) {
      const ClusteringSpec spec = draw_spec(variant, rng, n);
      const double j = jdist(rng);
      const Enumerator oracle(spec, n);
      const double e = log_relative_error(dp_Z(spec, n, j).log(), oracle.z(j).log());
      ++r.checks;
      if (!(e < opt.rel_tol))
        r.failures.push_back("Z n=" + std::to_string(n) + " J=" + num(j) + " rel=" + num(e) + " " +
                             spec_values(spec, n));
      const CanonicalTable dp = dp_W(spec, n), en = oracle.w();
      for (Eigen::Index a0 = 0; a0 < en.ln_w.size(); ++a0) {
        const double ew = log_relative_error(dp.ln_w(a0), en.ln_w(a0));
        ++r.checks;
        if (!(ew < opt.rel_tol))
          r.failures.push_back("W n=" + std::to_string(n) + " a0=" + std::to_string(a0) + " rel=" + num(ew) +
                               " " + spec_values(spec, n));
      }
    }
  }
  return r;
}

SuiteResult verify_density(const VerifyOptions& opt) {
  check_depth_option(opt);
  SuiteResult r{"density", 0, {}};
  std::mt19937_64 rng(opt.seed + 11);
  std::uniform_real_distribution<double> jdist(-3.0, 3.0);
  for (const std::string variant : {"first", "second"}) {
    for (int n = 1; n <= opt.depth; ++n) {
      for (int draw = 0; draw < opt.draws; ++draw) {
        const ClusteringSpec spec = draw_spec(variant, rng, n);
        const double j = jdist(rng);
        const double dp = dp_density(spec, n, j), en = enum_density(spec, n, j);
        ++r.checks;
        if (!(std::abs(dp - en) < opt.rel_tol))
          r.failures.push_back(variant + " n=" + std::to_string(n) + " J=" + num(j) + " dp=" + num(dp) +
                               " enum=" + num(en) + " " + spec_values(spec, n));
      }
    }
  }
  return r;
}

SuiteResult verify_entropy_first(int max_depth) {
  SuiteResult r{"entropy-first", 0, {}};
  for (int n = 1; n <= std::min(max_depth, 4); ++n) {
    const auto leaves = static_cast<std::int64_t>(leaf_count(n));
    // Subset classification: every pattern's entropy equals the number of subsets carrying it.
    std::map<Pattern1, BigCount> observed;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << leaves); ++mask)
      ++observed[pattern1_of(LeafSet::from_mask(n, mask))];
    for (std::int64_t a0 = 1; a0 <= leaves; ++a0) {
      BigCount total = 0;
      auto stream = enumerate_patterns1(n, a0);
      while (auto p = stream.next()) {
        const BigCount count = entropy1_exact(*p);
        total += count;
        const auto it = observed.find(*p);
        const BigCount seen = it == observed.end() ? BigCount(0) : it->second;
        ++r.checks;
        if (count != seen)
          r.failures.push_back("n=" + std::to_string(n) + " a0=" + std::to_string(a0) +
                               " pattern count " + count.str() + " vs subsets " + seen.str());
      }
      ++r.checks;
      if (total != binomial_exact(leaves, a0))
        r.failures.push_back("n=" + std::to_string(n) + " a0=" + std::to_string(a0) + " sum " + total.str() +
                             " vs binomial " + binomial_exact(leaves, a0).str());
    }
  }
  return r;
}

SuiteResult verify_entropy_second(int max_depth) {
  SuiteResult r{"entropy-second", 0, {}};
  for (int n = 1; n <= std::min(max_depth, 3); ++n) {
    const auto leaves = static_cast<std::int64_t>(leaf_count(n));
    std::map<Pattern2, BigCount> observed;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << leaves); ++mask)
      ++observed[pattern2_of(LeafSet::from_mask(n, mask))];
    std::vector<BigCount> total(static_cast<std::size_t>(leaves) + 1, 0);
    for (const auto& [p, seen] : observed) {
      const BigCount count = entropy2_exact(p);
      total[static_cast<std::size_t>(p.first_order().cardinality())] += count;
      ++r.checks;
      if (count != seen)
        r.failures.push_back("n=" + std::to_string(n) + " pattern entropy " + count.str() + " vs subsets " +
                             seen.str());
    }
    for (std::int64_t a0 = 1; a0 <= leaves; ++a0) {
      ++r.checks;
      if (total[static_cast<std::size_t>(a0)] != binomial_exact(leaves, a0))
        r.failures.push_back("n=" + std::to_string(n) + " a0=" + std::to_string(a0) + " sum " +
                             total[static_cast<std::size_t>(a0)].str());
    }
  }
  return r;
}

SuiteResult verify_patterns(int max_depth) {
  SuiteResult r{"patterns", 0, {}};
  for (int n = 1; n <= std::min(max_depth, 4); ++n) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << leaf_count(n)); ++mask) {
      const LeafSet a = LeafSet::from_mask(n, mask);
      const Pattern1 p1 = pattern1_of(a);
      const Pattern2 p2 = pattern2_of(a);
      ++r.checks;
      if (!p1.is_admissible() || !p2.is_consistent() || p2.first_order() != p1 ||
          p1.cardinality() != static_cast<std::int64_t>(a.size()))
        r.failures.push_back("n=" + std::to_string(n) + " A=" + a.to_string());
    }
  }
  return r;
}

SuiteResult verify_capacity(const VerifyOptions& opt) {
  SuiteResult r{"capacity", 0, {}};
  std::mt19937_64 rng(opt.seed + 23);
  for (int n = 1; n <= 6; ++n) {
    const std::uint64_t leaves = leaf_count(n);
    std::uniform_int_distribution<std::uint64_t> leaf(0, leaves - 1);
    std::bernoulli_distribution coin(0.5);
    for (int draw = 0; draw < opt.draws; ++draw) {
      const ConductanceProfile prof = profile_for(random_capacity(rng, n), n);
      std::vector<LeafIndex> ma, mb;
      for (LeafIndex u = 0; u < leaves; ++u) (coin(rng) ? ma : mb).push_back(u);
      if (ma.empty()) ma.push_back(leaf(rng));
      if (mb.empty()) mb.push_back(leaf(rng));
      const LeafSet a(n, ma), b(n, mb), ab = LeafSet::all(n);
      const double reduce = cap_reduce(a, prof), quad = cap_quadratic(a, prof);
      const double rel = std::abs(reduce - quad) / std::abs(quad);
      const std::string where = "n=" + std::to_string(n) + " A=" + a.to_string();
      ++r.checks;
      if (!(rel < opt.rel_tol))
        r.failures.push_back("reduce vs quadratic " + where + " rel=" + num(rel));
      ++r.checks;
      if (reduce > prof.conductance(0) * static_cast<double>(a.size()) * (1 + 1e-12))
        r.failures.push_back("linear bound " + where);
      // A and B partition the leaves here, so A u B is the full set.
      ++r.checks;
      if (cap_reduce(ab, prof) > (reduce + cap_reduce(b, prof)) * (1 + 1e-12))
        r.failures.push_back("subadditivity " + where + " B=" + b.to_string());
    }
  }
  return r;
}

SuiteResult verify_monotone(const VerifyOptions& opt) {
  SuiteResult r{"monotone", 0, {}};
  std::mt19937_64 rng(opt.seed + 37);
  const int draws = std::min(opt.draws, 3);
  for (const std::string variant : {"first", "second", "capacity"}) {
    for (int n = 1; n <= std::min(opt.depth, 3); ++n) {
      for (int draw = 0; draw < draws; ++draw) {
        const ClusteringSpec spec = draw_spec(variant, rng, n);
        const MonotoneReport rep = check_monotone(spec, n, 4);
        r.checks += rep.order_pairs + rep.union_pairs;
        for (const auto& v : rep.violations)
          r.failures.push_back(variant + " n=" + std::to_string(n) + " (" + v.condition + ") A=" +
                               v.a.to_string() + " B=" + v.b.to_string() + " " + spec_values(spec, n));
      }
    }
  }
  return r;
}

SuiteResult verify_reduction(const VerifyOptions& opt) {
  SuiteResult r{"second-order-reduction", 0, {}};
  std::mt19937_64 rng(opt.seed + 41);
  std::uniform_real_distribution<double> jdist(-3.0, 3.0);
  for (int draw = 0; draw < opt.draws; ++draw) {
    const FirstOrderSpec first = random_first_order(rng, 13);
    const SecondOrderSpec second{HArray::from_sequence(first.h, 14), std::nullopt};
    for (int n = 1; n <= 12; ++n) {
      const double j = jdist(rng);
      const double e = log_relative_error(dp_Z(first, n, j).log(), dp_Z(second, n, j).log());
      ++r.checks;
      if (!(e < 1e-10))
        r.failures.push_back("n=" + std::to_string(n) + " J=" + num(j) + " rel=" + num(e) + " " +
                             spec_values(first, n));
    }
  }
  return r;
}

VerifyReport run_verification(const VerifyOptions& opt) {
  check_depth_option(opt);
  VerifyReport report;
  for (const char* variant : {"first", "second", "capacity"}) report.suites.push_back(verify_z_and_w(variant, opt));
  report.suites.push_back(verify_density(opt));
  report.suites.push_back(verify_entropy_first(opt.depth));
  report.suites.push_back(verify_entropy_second(opt.depth));
  report.suites.push_back(verify_patterns(opt.depth));
  report.suites.push_back(verify_capacity(opt));
  report.suites.push_back(verify_monotone(opt));
  report.suites.push_back(verify_reduction(opt));
  return report;
}

}  // namespace pwc
