#include "oracle/oracle.hpp"

namespace jc {

std::pair<Dyadic, Dyadic> OracleTape::query(int64_t m, CostMeter& meter) {
  if (m < 1) throw Error(Err::usage, "oracle precision must be >= 1");
  auto a = answer(m);
  meter.charge_query(static_cast<uint64_t>(m));
  log_.push_back({m, a.first, a.second, meter.ticks});
  return a;
}

Ball OracleTape::c_ball(int64_t m, CostMeter& meter) {
  auto a = query(m, meter);
  return Ball(a.first, a.second, Dyadic::scaled(1, -(m - 1)));
}

std::pair<Dyadic, Dyadic> DyadicOracle::answer(int64_t m) {
  // nearest grid point, ties toward +inf: error <= 2^-(m+1) per coordinate
  return {re_.round_to_grid(m, Round::nearest), im_.round_to_grid(m, Round::nearest)};
}

Ball DyadicOracle::c_ball(int64_t m, CostMeter& meter) {
  // same charge and transcript as the generic path, but the enclosure is a
  // point ball: the tape holds the parameter exactly
  query(m, meter);
  return Ball(re_, im_, Dyadic());
}

OracleDescriptor DyadicOracle::descriptor() const {
  OracleDescriptor d{"dyadic", {{"re", re_.str()}, {"im", im_.str()}}};
  // real window [-2, 1/4]: the parameter's filled Julia set is connected
  if (im_.is_zero() && Dyadic(-2) <= re_ && re_ <= Dyadic::scaled(1, -2))
    d.fields.emplace_back("connected_k", "1");
  return d;
}

std::pair<Dyadic, Dyadic> IntervalOracle::answer(int64_t m) {
  // width <= 2^-(m+3) keeps |answer - c| <= 2^-(m+1) + 2^-(m+4) < 2^-m,
  // half of the guarantee band
  RealInterval enc = refine_(m + 3);
  return {enc.mid().round_to_grid(m, Round::nearest), Dyadic()};
}

DeferredOracle::DeferredOracle(const RealInterval& initial, Extender ext)
    : cur_(initial), ext_(std::move(ext)) {
  commits_.push_back({0, cur_.lo(), cur_.hi()});
}

OracleDescriptor DeferredOracle::descriptor() const {
  OracleDescriptor d{"deferred",
                     {{"lo", cur_.lo().str()}, {"hi", cur_.hi().str()},
                      {"depth", std::to_string(commits_.size() - 1)}}};
  if (Dyadic(-2) <= cur_.lo() && cur_.hi() <= Dyadic::scaled(1, -2))
    d.fields.emplace_back("connected_k", "1");
  return d;
}

bool DeferredOracle::compatible(const RealInterval& sub, std::string* why) const {
  if (!(cur_.lo() <= sub.lo() && sub.hi() <= cur_.hi())) {
    if (why) *why = "candidate is not inside the current commitment";
    return false;
  }
  for (const auto& [m, ans] : served_) {
    Dyadic band = Dyadic::scaled(1, -(m - 1));
    if (!(ans - band < sub.lo() && sub.hi() < ans + band)) {
      if (why)
        *why = "candidate breaks the guarantee band of the answer " + ans.str() +
               " served at precision " + std::to_string(m);
      return false;
    }
  }
  return true;
}

void DeferredOracle::commit(const RealInterval& sub) {
  std::string why;
  if (!compatible(sub, &why)) throw Error(Err::usage, "commit rejected: " + why);
  cur_ = sub;
  commits_.push_back({static_cast<int64_t>(commits_.size()), cur_.lo(), cur_.hi()});
}

std::pair<Dyadic, Dyadic> DeferredOracle::answer(int64_t m) {
  // nearest-rounded midpoint has error <= 2^-(m+1) + width/2, so the answer
  // is valid for the whole commitment whenever width <= 2^-(m-1); with an
  // extender we refine further, to half-band margin, before serving
  if (ext_ && cur_.width() > Dyadic::scaled(1, -(m + 2))) {
    commit(ext_(m + 2));
  } else if (cur_.width() > Dyadic::scaled(1, -(m - 1))) {
    throw Error(Err::ceiling,
                "deferred oracle cannot answer precision " + std::to_string(m) +
                    " without extending the commitment");
  }
  Dyadic a = cur_.mid().round_to_grid(m, Round::nearest);
  served_.push_back({m, a});
  return {a, Dyadic()};
}

}  // namespace jc
