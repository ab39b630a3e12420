#include "starsim/cache_types.hpp"

#include <algorithm>

namespace starsim {

void LineBuffer::assign(std::span<const std::uint8_t> src) {
  size = static_cast<std::uint32_t>(src.size());
  std::copy(src.begin(), src.end(), bytes.begin());
}

std::string_view to_string(AccessKind k) noexcept {
  switch (k) {
    case AccessKind::Hit: return "HIT";
    case AccessKind::MissFilled: return "MISS_FILLED";
    case AccessKind::MissForwardNoFill: return "MISS_FORWARD_NOFILL";
  }
  return "?";
}

SFillInvResult decide_sfill_inv(SFillInvCase found, unsigned source_level, unsigned level) noexcept {
  if (found == SFillInvCase::FoundNonSpeculative) return {SFillInvAction::Drop, found};
  return {source_level > level ? SFillInvAction::Propagate : SFillInvAction::Drop, found};
}

std::string_view to_string(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::SaLru: return "sa-lru";
    case ModelKind::StarFarr: return "star-farr";
    case ModelKind::StarNews: return "star-news";
  }
  return "?";
}

ModelKind parse_model(std::string_view name) {
  if (name == "sa-lru") return ModelKind::SaLru;
  if (name == "star-farr") return ModelKind::StarFarr;
  if (name == "star-news") return ModelKind::StarNews;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected sa-lru, star-farr or star-news)");
}

FaultInjection parse_fault(std::string_view name) {
  if (name.empty() || name == "none") return FaultInjection::None;
  if (name == "farr-deterministic-victim") return FaultInjection::FarrDeterministicVictim;
  if (name == "news-fill-on-spec-tagmiss") return FaultInjection::NewsFillOnSpecTagMiss;
  throw ConfigError("unknown fault '" + std::string(name) + "'");
}

std::string_view to_string(FaultInjection f) noexcept {
  switch (f) {
    case FaultInjection::None: return "none";
    case FaultInjection::FarrDeterministicVictim: return "farr-deterministic-victim";
    case FaultInjection::NewsFillOnSpecTagMiss: return "news-fill-on-spec-tagmiss";
  }
  return "?";
}

}  // namespace starsim
