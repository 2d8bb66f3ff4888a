#pragma once

// Trial outcomes and the seeded search loop shared by every randomised
// method. Trial i always draws from stream (seed, i), so a serial run and a
// parallel run see the same trials; the lowest successful index wins.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "ecmkit/bigmod.hpp"

namespace ecmkit {

enum class TrialStatus { factor_found, no_factor, trivial };

struct TrialOutcome {
  TrialStatus status = TrialStatus::no_factor;
  Natural divisor = 1;
  int phase = 0;  // 1 or 2 for elliptic and p-1 trials, 0 otherwise
  WorkLedger ledger;
  std::uint64_t iterations = 0;

  static TrialOutcome found(Natural d, int phase) {
    TrialOutcome t;
    t.status = TrialStatus::factor_found;
    t.divisor = std::move(d);
    t.phase = phase;
    return t;
  }
  static TrialOutcome trivial(const Natural& n, int phase) {
    TrialOutcome t;
    t.status = TrialStatus::trivial;
    t.divisor = n;
    t.phase = phase;
    return t;
  }
};

/// Folds a divisor reported by an inversion or gcd into an outcome.
inline TrialOutcome classify(const FactorEvent& ev, const Natural& n, int phase) {
  if (ev.is_trivial(n)) return TrialOutcome::trivial(n, phase);
  return TrialOutcome::found(ev.divisor, phase);
}

// Consecutive trivial outcomes tolerated before giving up on a number.
inline constexpr int kMaxTrivialRedraws = 5;

struct SearchOptions {
  unsigned threads = 1;
  std::uint64_t max_trials = 100000;
};

struct SearchResult {
  TrialStatus status = TrialStatus::no_factor;
  Natural divisor = 1;
  int phase = 0;
  std::uint64_t trials_used = 0;
  std::uint64_t iterations = 0;
  WorkLedger ledger;
};

using TrialFunction = std::function<TrialOutcome(std::uint64_t index)>;

namespace detail {

// Consumes outcomes in index order: the first factor wins; a run of more than
// kMaxTrivialRedraws trivial outcomes ends the search.
struct Settler {
  std::uint64_t expect = 0;
  int streak = 0;

  bool feed(std::map<std::uint64_t, TrialOutcome>& done, SearchResult& res) {
    for (auto it = done.find(expect); it != done.end(); it = done.find(expect)) {
      TrialOutcome t = std::move(it->second);
      done.erase(it);
      ++expect;
      streak = t.status == TrialStatus::trivial ? streak + 1 : 0;
      if (t.status == TrialStatus::factor_found || streak > kMaxTrivialRedraws) {
        res.status = t.status;
        res.divisor = std::move(t.divisor);
        res.phase = t.phase;
        res.trials_used = expect;
        return true;
      }
    }
    return false;
  }
};

}  // namespace detail

/// Runs trials 0, 1, 2, ... until one finds a proper factor, the trivial
/// streak limit is hit, or max_trials is spent. Ledgers of every executed
/// trial are merged.
inline SearchResult run_search(const TrialFunction& trial, const SearchOptions& opt) {
  SearchResult res;
  if (opt.threads <= 1) {
    int streak = 0;
    for (std::uint64_t i = 0; i < opt.max_trials; ++i) {
      TrialOutcome t = trial(i);
      res.ledger += t.ledger;
      res.iterations += t.iterations;
      res.trials_used = i + 1;
      if (t.status == TrialStatus::factor_found) {
        res.status = t.status;
        res.divisor = std::move(t.divisor);
        res.phase = t.phase;
        return res;
      }
      streak = t.status == TrialStatus::trivial ? streak + 1 : 0;
      if (streak > kMaxTrivialRedraws) {
        res.status = TrialStatus::trivial;
        res.divisor = std::move(t.divisor);
        res.phase = t.phase;
        return res;
      }
    }
    return res;
  }

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::map<std::uint64_t, TrialOutcome> done;
  SearchResult settled;
  detail::Settler settler;
  bool have = false;

  auto worker = [&] {
    while (!stop.load()) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= opt.max_trials) return;
      TrialOutcome t = trial(i);
      std::lock_guard lock(mu);
      res.ledger += t.ledger;
      res.iterations += t.iterations;
      done.emplace(i, std::move(t));
      if (!have && settler.feed(done, settled)) {
        have = true;
        stop.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < opt.threads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  if (have) {
    res.status = settled.status;
    res.divisor = settled.divisor;
    res.phase = settled.phase;
    res.trials_used = settled.trials_used;
  } else {
    res.trials_used = std::min<std::uint64_t>(next.load(), opt.max_trials);
  }
  return res;
}

}  // namespace ecmkit
