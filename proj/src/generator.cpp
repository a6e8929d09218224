#include "sigjoin/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace sigjoin {

namespace {

// Plain modulo reduction keeps output identical across standard libraries,
// unlike std::uniform_int_distribution.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

std::string random_key(std::mt19937_64& rng, std::size_t len) {
  std::string key(len, ' ');
  for (auto& c : key) c = static_cast<char>(0x20 + below(rng, 0x7F - 0x20));
  return key;
}

Tuple make_row(std::mt19937_64& rng, std::int64_t id, std::string key, std::size_t pad_len) {
  const Date created{static_cast<std::int16_t>(1990 + below(rng, 19)), static_cast<std::uint8_t>(1 + below(rng, 12)),
                     static_cast<std::uint8_t>(1 + below(rng, 28))};
  std::string pad(pad_len, 'a');
  for (auto& c : pad) c = static_cast<char>('a' + below(rng, 26));
  return {id, static_cast<char>('A' + below(rng, 26)), std::move(key), created, std::move(pad)};
}

}  // namespace

void GenSpec::validate() const {
  if (card_r < 1) throw std::invalid_argument("card_r must be at least 1 (empty build side)");
  if (card_r > card_s) throw std::invalid_argument("card_r must not exceed card_s (R is the smaller relation)");
  if (attr_len < 1) throw std::invalid_argument("attr_len must be at least 1");
  if (!(selectivity >= 0.0 && selectivity <= 1.0)) throw std::invalid_argument("selectivity must be in [0, 1]");
}

std::uint64_t GenSpec::target_matches() const {
  return static_cast<std::uint64_t>(std::llround(selectivity * static_cast<double>(card_r) * static_cast<double>(card_s)));
}

double GenSpec::default_selectivity(std::size_t card_r, std::size_t card_s) {
  return 1.5 / static_cast<double>(std::max<std::size_t>({card_r, card_s, 1}));
}

Schema generated_schema() {
  return Schema({{"id", ColumnType::Integer},
                 {"grade", ColumnType::Character},
                 {kGeneratedKeyColumn, ColumnType::String},
                 {"created", ColumnType::Date},
                 {"pad", ColumnType::String}},
                kGeneratedKeyColumn);
}

GeneratedPair generate_pair(const GenSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const std::uint64_t target = spec.target_matches();

  // Each S row that copies an R key yields as many matches as that key has R
  // rows; when the target exceeds card_s, R keys come from a smaller pool so
  // they repeat.
  std::size_t pool_size = spec.card_r;
  if (target > spec.card_s) {
    pool_size = std::max<std::size_t>(
        1, static_cast<std::size_t>(static_cast<double>(spec.card_r) * spec.card_s / static_cast<double>(target)));
  }
  std::vector<std::string> pool;
  pool.reserve(pool_size);
  {
    std::unordered_map<std::string, bool> used;
    for (std::size_t i = 0; i < pool_size; ++i) {
      std::string key = random_key(rng, spec.attr_len);
      for (int attempt = 0; attempt < 64 && used.contains(key); ++attempt) key = random_key(rng, spec.attr_len);
      used[key] = true;
      pool.push_back(std::move(key));
    }
  }

  std::vector<std::string> r_keys(spec.card_r);
  for (std::size_t i = 0; i < spec.card_r; ++i) {
    r_keys[i] = pool_size == spec.card_r ? pool[i] : pool[below(rng, pool_size)];
  }
  std::unordered_map<std::string_view, std::uint64_t> r_count;
  for (const auto& k : r_keys) ++r_count[k];

  // Distinct R keys ordered by multiplicity, for filling the last few matches.
  std::vector<std::pair<std::uint64_t, std::string_view>> by_count;
  by_count.reserve(r_count.size());
  for (const auto& [k, c] : r_count) by_count.emplace_back(c, k);
  std::sort(by_count.begin(), by_count.end());

  std::vector<std::string> s_keys;
  s_keys.reserve(spec.card_s);
  std::uint64_t remaining = target;
  while (remaining > 0 && s_keys.size() < spec.card_s) {
    std::string_view pick = r_keys[below(rng, spec.card_r)];
    if (r_count[pick] > remaining) {
      const auto usable = std::partition_point(by_count.begin(), by_count.end(),
                                               [&](const auto& e) { return e.first <= remaining; });
      if (usable == by_count.begin()) break;
      // random key among those with the largest usable multiplicity
      const auto count = std::prev(usable)->first;
      const auto first = std::partition_point(by_count.begin(), usable, [&](const auto& e) { return e.first < count; });
      pick = (first + static_cast<std::ptrdiff_t>(below(rng, static_cast<std::uint64_t>(usable - first))))->second;
    }
    remaining -= r_count[pick];
    s_keys.emplace_back(pick);
  }
  while (s_keys.size() < spec.card_s) {
    std::string key = random_key(rng, spec.attr_len);
    for (int attempt = 0; attempt < 64 && r_count.contains(key); ++attempt) key = random_key(rng, spec.attr_len);
    s_keys.push_back(std::move(key));
  }
  for (std::size_t i = s_keys.size(); i > 1; --i) std::swap(s_keys[i - 1], s_keys[below(rng, i)]);

  GeneratedPair out{Relation(generated_schema()), Relation(generated_schema()), 0};
  for (const auto& k : s_keys) {
    if (auto it = r_count.find(k); it != r_count.end()) out.planted_matches += it->second;
  }

  const std::size_t fixed = sizeof(std::int64_t) + 1 + spec.attr_len + 10;
  const std::size_t pad_len = spec.row_bytes > fixed ? spec.row_bytes - fixed : 0;
  for (std::size_t i = 0; i < spec.card_r; ++i) {
    out.r.append(make_row(rng, static_cast<std::int64_t>(i + 1), std::move(r_keys[i]), pad_len));
  }
  for (std::size_t i = 0; i < spec.card_s; ++i) {
    out.s.append(make_row(rng, static_cast<std::int64_t>(i + 1), std::move(s_keys[i]), pad_len));
  }
  return out;
}

}  // namespace sigjoin
