#include "goci/distance.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "goci/plan.hpp"

namespace goci {

namespace {

constexpr std::size_t kWindow = 4096;
constexpr std::size_t kMinMatch = 3;
constexpr std::size_t kMaxMatch = kMinMatch + 15 + 255;
constexpr std::size_t kHashBits = 13;
constexpr std::size_t kMaxChain = 256;

std::size_t hash3(const unsigned char* p) {
  std::uint32_t v = (std::uint32_t(p[0]) << 16) | (std::uint32_t(p[1]) << 8) | p[2];
  return (v * 2654435761u) >> (32 - kHashBits);
}

}  // namespace

std::string lzss_compress(std::string_view data) {
  const auto* in = reinterpret_cast<const unsigned char*>(data.data());
  const std::size_t n = data.size();
  std::string out;
  out.reserve(n + n / 8 + 8);
  auto len32 = static_cast<std::uint32_t>(n);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((len32 >> (8 * i)) & 0xff));

  std::vector<std::int64_t> head(std::size_t{1} << kHashBits, -1);
  std::vector<std::int64_t> prev(n, -1);
  auto insert = [&](std::size_t pos) {
    if (pos + kMinMatch > n) return;
    auto h = hash3(in + pos);
    prev[pos] = head[h];
    head[h] = static_cast<std::int64_t>(pos);
  };

  std::size_t flag_at = 0;
  int tokens = 8;
  std::size_t pos = 0;
  while (pos < n) {
    if (tokens == 8) {
      flag_at = out.size();
      out.push_back(0);
      tokens = 0;
    }
    std::size_t best_len = 0, best_off = 0;
    if (pos + kMinMatch <= n) {
      const std::size_t limit = std::min(kMaxMatch, n - pos);
      std::size_t chain = 0;
      for (auto cand = head[hash3(in + pos)]; cand >= 0 && chain < kMaxChain; cand = prev[cand], ++chain) {
        const auto c = static_cast<std::size_t>(cand);
        if (pos - c > kWindow) break;
        std::size_t l = 0;
        while (l < limit && in[c + l] == in[pos + l]) ++l;
        if (l > best_len) {
          best_len = l;
          best_off = pos - c;
          if (l == limit) break;
        }
      }
    }
    if (best_len >= kMinMatch) {
      out[flag_at] = static_cast<char>(out[flag_at] | (1 << tokens));
      const std::size_t off = best_off - 1;
      const std::size_t code = std::min<std::size_t>(best_len - kMinMatch, 15);
      out.push_back(static_cast<char>(off & 0xff));
      out.push_back(static_cast<char>(((off >> 8) & 0x0f) | (code << 4)));
      if (code == 15) out.push_back(static_cast<char>(best_len - kMinMatch - 15));
      for (std::size_t k = 0; k < best_len; ++k) insert(pos + k);
      pos += best_len;
    } else {
      out.push_back(static_cast<char>(in[pos]));
      insert(pos);
      ++pos;
    }
    ++tokens;
  }
  return out;
}

std::string lzss_decompress(std::string_view packed) {
  const auto* in = reinterpret_cast<const unsigned char*>(packed.data());
  if (packed.size() < 4) throw std::invalid_argument("truncated LZSS header");
  std::size_t n = 0;
  for (int i = 0; i < 4; ++i) n |= std::size_t(in[i]) << (8 * i);
  std::string out;
  out.reserve(n);
  std::size_t p = 4;
  while (out.size() < n) {
    if (p >= packed.size()) throw std::invalid_argument("truncated LZSS stream");
    const unsigned flags = in[p++];
    for (int t = 0; t < 8 && out.size() < n; ++t) {
      if (!(flags & (1u << t))) {
        if (p >= packed.size()) throw std::invalid_argument("truncated LZSS stream");
        out.push_back(static_cast<char>(in[p++]));
        continue;
      }
      if (p + 2 > packed.size()) throw std::invalid_argument("truncated LZSS match");
      std::size_t off = (in[p] | (std::size_t(in[p + 1] & 0x0f) << 8)) + 1;
      std::size_t len = (in[p + 1] >> 4) + kMinMatch;
      p += 2;
      if (len == kMinMatch + 15) {
        if (p >= packed.size()) throw std::invalid_argument("truncated LZSS length");
        len += in[p++];
      }
      if (off > out.size()) throw std::invalid_argument("LZSS offset before start");
      const std::size_t from = out.size() - off;
      for (std::size_t k = 0; k < len; ++k) out.push_back(out[from + k]);
    }
  }
  return out;
}

std::size_t compressed_size(std::string_view data) { return lzss_compress(data).size(); }

DistanceReport ncd(std::string_view a, std::string_view b, const Compressor& c) {
  if (a.empty() && b.empty()) throw std::domain_error("ncd of two empty plans is undefined");
  DistanceReport r;
  r.len_a = a.size();
  r.len_b = b.size();
  // Both orders, keep the smaller: an adaptive compressor sees a and b
  // differently depending on which comes first, and short plans make that
  // asymmetry large.
  auto joined = [](std::string_view x, std::string_view y) {
    std::string j;
    j.reserve(x.size() + y.size() + 1);
    j.append(x).push_back('\n');
    j.append(y);
    return j;
  };
  r.c_a = c(a);
  r.c_b = c(b);
  r.c_ab = c(joined(a, b));
  if (a != b) r.c_ab = std::min(r.c_ab, c(joined(b, a)));
  const double lo = static_cast<double>(std::min(r.c_a, r.c_b));
  const double hi = static_cast<double>(std::max(r.c_a, r.c_b));
  r.ncd = (static_cast<double>(r.c_ab) - lo) / hi;
  return r;
}

DistanceTarget::DistanceTarget(const GroundExample& x, const Domain& d, const BuiltinRegistry& reg)
    : example(&x), domain(&d), builtins(&reg), plan(derive_plan(x, d, reg)) {}

DistanceReport conceptual_distance(const Theory& t, const DistanceTarget& target) {
  DistanceReport best;
  best.failed = true;
  best.failure = "theory has no clauses";
  bool any = false;
  for (const auto& c : t.clauses) {
    try {
      auto g = ground_clause(c, *target.example, *target.domain, true, *target.builtins);
      auto plan = derive_plan(g.facts, *target.domain, *target.builtins);
      if (plan.empty() && target.plan.empty()) {
        DistanceReport r;
        r.ncd = 0.0;
        if (!any || r.ncd < best.ncd) best = r;
        any = true;
        continue;
      }
      auto r = ncd(plan, target.plan);
      r.ncd = std::clamp(r.ncd, 0.0, kDistanceSentinel);
      if (!any || r.ncd < best.ncd) best = r;
      any = true;
    } catch (const std::exception& e) {
      if (!any) best.failure = e.what();
    }
  }
  if (!any) best.ncd = kDistanceSentinel;
  return best;
}

DistanceReport conceptual_distance(const Theory& t, const GroundExample& x, const Domain& d,
                                   const BuiltinRegistry& reg) {
  return conceptual_distance(t, DistanceTarget(x, d, reg));
}

}  // namespace goci
