#include "cg/state_id.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace cg {

namespace {

constexpr std::array<std::string_view, size_t(Tag::Count_)> kTagNames = {
    "c",     "cij",    "d",        "r0",     "r1",      "u",       "b",      "bij",   "bijl",
    "lose",  "win",    "sprime",   "sdprime", "s0",     "t",       "f",      "target", "sink",
    "layer0", "layer1", "clock",   "boundary", "gadget", "product", "hub",   "aux"};

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::string_view tag_name(Tag t) { return kTagNames.at(size_t(t)); }

std::optional<Tag> tag_from_name(std::string_view name) {
  for (size_t i = 0; i < kTagNames.size(); ++i)
    if (kTagNames[i] == name) return Tag(i);
  return std::nullopt;
}

bool operator<(const StateId& a, const StateId& b) {
  if (a.tag != b.tag) return a.tag < b.tag;
  if (a.params != b.params)
    return std::lexicographical_compare(a.params.begin(), a.params.end(), b.params.begin(),
                                        b.params.end());
  return std::lexicographical_compare(a.nest.begin(), a.nest.end(), b.nest.begin(), b.nest.end());
}

size_t hash_value(const StateId& s) {
  uint64_t h = mix64(uint64_t(s.tag) + 0x51ULL * (s.params.size() + 7 * s.nest.size()));
  for (int64_t p : s.params) h = mix64(h ^ uint64_t(p));
  for (int64_t n : s.nest) h = mix64(h ^ (uint64_t(n) + 0x1234567ULL));
  return size_t(h);
}

std::string encode(const StateId& s) {
  std::string out(tag_name(s.tag));
  if (!s.params.empty()) {
    out += '(';
    for (size_t i = 0; i < s.params.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(s.params[i]);
    }
    out += ')';
  }
  if (!s.nest.empty()) {
    out += '@';
    for (size_t i = 0; i < s.nest.size(); ++i) {
      if (i) out += '.';
      out += std::to_string(s.nest[i]);
    }
  }
  return out;
}

namespace {

bool parse_int(std::string_view sv, int64_t& v) {
  if (sv.empty()) return false;
  auto res = std::from_chars(sv.data(), sv.data() + sv.size(), v);
  return res.ec == std::errc() && res.ptr == sv.data() + sv.size();
}

}  // namespace

std::optional<StateId> decode(std::string_view text) {
  size_t name_end = text.find_first_of("(@");
  std::string_view name = text.substr(0, name_end);
  auto tag = tag_from_name(name);
  if (!tag) return std::nullopt;
  StateId s;
  s.tag = *tag;
  size_t pos = name_end;
  if (pos != std::string_view::npos && text[pos] == '(') {
    size_t close = text.find(')', pos);
    if (close == std::string_view::npos) return std::nullopt;
    std::string_view body = text.substr(pos + 1, close - pos - 1);
    while (!body.empty()) {
      size_t comma = body.find(',');
      int64_t v;
      if (!parse_int(body.substr(0, comma), v)) return std::nullopt;
      s.params.push_back(v);
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
      if (body.empty()) return std::nullopt;
    }
    pos = close + 1;
    if (pos == text.size()) pos = std::string_view::npos;
  }
  if (pos != std::string_view::npos) {
    if (text[pos] != '@') return std::nullopt;
    std::string_view body = text.substr(pos + 1);
    if (body.empty()) return std::nullopt;
    while (true) {
      size_t dot = body.find('.');
      int64_t v;
      if (!parse_int(body.substr(0, dot), v)) return std::nullopt;
      s.nest.push_back(v);
      if (dot == std::string_view::npos) break;
      body.remove_prefix(dot + 1);
    }
  }
  return s;
}

// Layout of a wrapped state: [inner tag, #inner params, inner params..., extra...];
// inner nest is kept in the outer nest.
StateId wrap(Tag outer, const StateId& inner, std::initializer_list<int64_t> extra) {
  StateId s;
  s.tag = outer;
  s.params.reserve(2 + inner.params.size() + extra.size());
  s.params.push_back(int64_t(inner.tag));
  s.params.push_back(int64_t(inner.params.size()));
  s.params.insert(s.params.end(), inner.params.begin(), inner.params.end());
  s.params.insert(s.params.end(), extra.begin(), extra.end());
  s.nest = inner.nest;
  return s;
}

std::optional<std::pair<StateId, std::vector<int64_t>>> unwrap(const StateId& s) {
  if (s.params.size() < 2) return std::nullopt;
  int64_t tag = s.params[0];
  int64_t n = s.params[1];
  if (tag < 0 || tag >= int64_t(Tag::Count_) || n < 0 || size_t(2 + n) > s.params.size())
    return std::nullopt;
  StateId inner;
  inner.tag = Tag(tag);
  inner.params.assign(s.params.begin() + 2, s.params.begin() + 2 + n);
  inner.nest = s.nest;
  std::vector<int64_t> extra(s.params.begin() + 2 + n, s.params.end());
  return std::make_pair(std::move(inner), std::move(extra));
}

uint64_t cantor_pair(uint64_t a, uint64_t b) {
  uint64_t s = a + b;
  if (s < a || s > 6000000000ULL) throw std::overflow_error("cantor_pair: arguments too large");
  return s * (s + 1) / 2 + b;
}

std::pair<uint64_t, uint64_t> cantor_unpair(uint64_t z) {
  auto w = uint64_t((std::sqrt(8.0L * (long double)z + 1.0L) - 1.0L) / 2.0L);
  while (w * (w + 1) / 2 > z) --w;
  while ((w + 1) * (w + 2) / 2 <= z) ++w;
  uint64_t t = w * (w + 1) / 2;
  uint64_t b = z - t;
  return {w - b, b};
}

std::vector<uint64_t> cantor_unpack(uint64_t z, size_t k) {
  std::vector<uint64_t> out;
  if (k == 0) return out;
  out.reserve(k);
  for (size_t i = 0; i + 1 < k; ++i) {
    auto [a, rest] = cantor_unpair(z);
    out.push_back(a);
    z = rest;
  }
  out.push_back(z);
  return out;
}

uint64_t cantor_pack(const std::vector<uint64_t>& xs) {
  if (xs.empty()) return 0;
  uint64_t z = xs.back();
  for (size_t i = xs.size() - 1; i-- > 0;) z = cantor_pair(xs[i], z);
  return z;
}

}  // namespace cg
