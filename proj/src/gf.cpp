#include "sigjoin/gf.hpp"

#include <cstdio>
#include <mutex>
#include <string>

namespace sigjoin {

GfContext::GfContext(unsigned width) : width_(width) {
  if (width == 8) {
    poly_ = kPoly8;
  } else if (width == 16) {
    poly_ = kPoly16;
  } else {
    throw GfError("unsupported field width " + std::to_string(width) + " (expected 8 or 16)");
  }
  const std::uint32_t sz = 1u << width_;
  order_ = sz - 1;
  log_.assign(sz, 0);
  antilog_.assign(2 * static_cast<std::size_t>(order_) + kExpSlack, 0);

  std::vector<bool> seen(sz, false);
  std::uint32_t x = 1;
  for (std::uint32_t k = 0; k < order_; ++k) {
    if (seen[x]) {
      char hex[16];
      std::snprintf(hex, sizeof hex, "0x%X", poly_);
      throw GfError(std::string("polynomial ") + hex + " is not primitive: cycle of length " + std::to_string(k));
    }
    seen[x] = true;
    for (std::size_t at = k; at < antilog_.size(); at += order_) antilog_[at] = static_cast<GfElement>(x);
    log_[x] = static_cast<std::uint16_t>(k);
    x <<= 1;
    if (x & sz) x ^= poly_;
  }
  if (x != 1) throw GfError("polynomial is not primitive: alpha^(2^f-1) != 1");
}

std::shared_ptr<const GfContext> GfContext::shared(unsigned width) {
  static std::once_flag once8, once16;
  static std::shared_ptr<const GfContext> ctx8, ctx16;
  if (width == 8) {
    std::call_once(once8, [] { ctx8 = std::make_shared<const GfContext>(8); });
    return ctx8;
  }
  if (width == 16) {
    std::call_once(once16, [] { ctx16 = std::make_shared<const GfContext>(16); });
    return ctx16;
  }
  throw GfError("unsupported field width " + std::to_string(width) + " (expected 8 or 16)");
}

GfElement GfContext::pow(GfElement a, std::uint64_t k) const noexcept {
  if (k == 0) return 1;
  if (a == 0) return 0;
  const std::uint64_t e = (static_cast<std::uint64_t>(log_[a]) * (k % order_)) % order_;
  return antilog_[e];
}

}  // namespace sigjoin
