// Oracle tapes: deterministic dyadic answers about a complex parameter.
// An answer at precision m lies on the 2^-m grid within max-norm 2^-(m-1)
// of the true parameter; querying at precision m costs m ticks.
#pragma once

#include "num/ball.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace jc {

struct CostMeter {
  uint64_t ticks = 0;
  uint64_t max_precision = 0;
  uint64_t limit = 0;  // 0 = unlimited; exceeding a set limit throws ceiling
  void charge(uint64_t k) {
    ticks += k;
    if (limit && ticks > limit) throw Error(Err::ceiling, "tick budget exhausted");
  }
  void charge_query(uint64_t m) {
    if (m > max_precision) max_precision = m;
    charge(m);
  }
};

struct TranscriptEntry {
  int64_t m;
  Dyadic re, im;
  uint64_t ticks_after;
};

struct OracleDescriptor {
  std::string kind;  // "dyadic" | "root" | "root_offset" | "deferred"
  std::vector<std::pair<std::string, std::string>> fields;
};

class OracleTape {
 public:
  virtual ~OracleTape() = default;

  // serve an answer at precision m >= 1, charging m ticks
  std::pair<Dyadic, Dyadic> query(int64_t m, CostMeter& meter);
  // enclosure of the true parameter derived from a charged query: a ball
  // around the answer of radius at most the guarantee band 2^-(m-1);
  // tapes that know the parameter exactly may return a point ball
  virtual Ball c_ball(int64_t m, CostMeter& meter);

  const std::vector<TranscriptEntry>& transcript() const { return log_; }
  void clear_transcript() { log_.clear(); }
  virtual OracleDescriptor descriptor() const = 0;

 protected:
  // deterministic uncharged answer rule; must satisfy the band guarantee
  virtual std::pair<Dyadic, Dyadic> answer(int64_t m) = 0;

 private:
  std::vector<TranscriptEntry> log_;
};

// parameter known exactly as a dyadic point
class DyadicOracle : public OracleTape {
 public:
  DyadicOracle(const Dyadic& re, const Dyadic& im) : re_(re), im_(im) {}
  OracleDescriptor descriptor() const override;
  Ball c_ball(int64_t m, CostMeter& meter) override;
  const Dyadic& true_re() const { return re_; }
  const Dyadic& true_im() const { return im_; }

 protected:
  std::pair<Dyadic, Dyadic> answer(int64_t m) override;

 private:
  Dyadic re_, im_;
};

// real parameter known through a refinable enclosure; refine(bits) must
// return an interval of width <= 2^-bits containing the parameter
class IntervalOracle : public OracleTape {
 public:
  using Refiner = std::function<RealInterval(int64_t bits)>;
  IntervalOracle(Refiner r, OracleDescriptor d) : refine_(std::move(r)), desc_(std::move(d)) {}
  OracleDescriptor descriptor() const override { return desc_; }
  RealInterval enclosure(int64_t bits) { return refine_(bits); }

 protected:
  std::pair<Dyadic, Dyadic> answer(int64_t m) override;

 private:
  Refiner refine_;
  OracleDescriptor desc_;
};

// real parameter revealed as a shrinking committed interval; answers are
// valid for every real in the current commitment
class DeferredOracle : public OracleTape {
 public:
  struct Commitment {
    int64_t depth;
    Dyadic lo, hi;
  };
  // extender(bits) picks the next committed sub-interval of width <= 2^-bits;
  // without one, queries beyond the committed depth fail
  using Extender = std::function<RealInterval(int64_t bits)>;

  DeferredOracle(const RealInterval& initial, Extender ext = nullptr);
  OracleDescriptor descriptor() const override;

  const RealInterval& current() const { return cur_; }
  const std::vector<Commitment>& commitments() const { return commits_; }
  // explicit commitment to a sub-interval; rejects any choice that breaks a
  // served answer's guarantee band
  void commit(const RealInterval& sub);
  // check a candidate without committing
  bool compatible(const RealInterval& sub, std::string* why = nullptr) const;

 protected:
  std::pair<Dyadic, Dyadic> answer(int64_t m) override;

 private:
  RealInterval cur_;
  Extender ext_;
  std::vector<Commitment> commits_;
  std::vector<std::pair<int64_t, Dyadic>> served_;  // (m, re answer)
};

}  // namespace jc
