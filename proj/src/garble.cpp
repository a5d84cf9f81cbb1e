// SPDX-License-Identifier: Apache-2.0
#include "qmpc/garble.hpp"

#include <sodium.h>

#include <bit>
#include <sstream>

namespace qmpc {

namespace {

constexpr int kMaxArity = 16;

Bytes pack_bits(const BitVec& v) {
  Bytes out((v.size() + 7) / 8, 0);
  for (size_t i = 0; i < v.size(); ++i)
    if (v.get(i)) out[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
  return out;
}

BitVec random_bits(size_t n, BitSource& coins) {
  BitVec v(n);
  for (size_t i = 0; i < n; ++i) v.set(i, coins.next_bit());
  return v;
}

Bytes random_bytes(size_t n, BitSource& coins) {
  Bytes out(n);
  for (auto& b : out) b = static_cast<uint8_t>(coins.next_bits(8));
  return out;
}

void put_u32(Bytes& msg, uint32_t v) {
  for (int i = 0; i < 4; ++i) msg.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

// Keystream for one row, bound to the row index and every selecting key.
Bytes row_pad(const GarbledTable& t, size_t row, const std::vector<const BitVec*>& keys) {
  size_t len = t.row_len();
  Bytes pad(len, 0);
  if (t.mode == GarbleMode::TestOtp) {
    for (const BitVec* k : keys) {
      Bytes kb = pack_bits(*k);
      for (size_t i = 0; i < len; ++i) pad[i] ^= kb[i];
    }
    return pad;
  }
  if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
  static const char domain[] = "qmpc-garble-row";
  Bytes base(domain, domain + sizeof domain);
  put_u32(base, static_cast<uint32_t>(t.arity));
  put_u32(base, static_cast<uint32_t>(row));
  for (const BitVec* k : keys) {
    Bytes kb = pack_bits(*k);
    put_u32(base, static_cast<uint32_t>(k->size()));
    base.insert(base.end(), kb.begin(), kb.end());
  }
  for (uint32_t block = 0; block * 64 < len; ++block) {
    Bytes msg = base;
    put_u32(msg, block);
    uint8_t out[64];
    crypto_generichash(out, sizeof out, msg.data(), msg.size(), nullptr, 0);
    for (size_t i = 0; i < 64 && block * 64 + i < len; ++i) pad[block * 64 + i] = out[i];
  }
  return pad;
}

GarbledTable empty_table(int k, size_t out_len, const GarbleOptions& opt) {
  GarbledTable t;
  t.arity = k;
  t.key_bits = opt.key_bits;
  t.out_len = out_len;
  t.tag_bytes = opt.tag_bytes;
  t.mode = opt.mode;
  t.rows.assign(size_t{1} << k, Bytes());
  return t;
}

void check_arity(int k) {
  if (k < 1 || k > kMaxArity) throw std::invalid_argument("garble: arity out of range");
}

}  // namespace

BitVec Label::bits() const {
  BitVec v(key.size() + 1);
  v.assign_slice(0, key);
  v.set(key.size(), pp);
  return v;
}

Label Label::from_bits(const BitVec& bits) {
  if (bits.size() == 0) throw std::invalid_argument("Label::from_bits: empty");
  return {bits.slice(0, bits.size() - 1), bits.get(bits.size() - 1)};
}

std::string GarbledTable::serialize() const {
  std::ostringstream os;
  os << "GT1:" << arity << ',' << key_bits << ',' << out_len << ',' << tag_bytes << ','
     << (mode == GarbleMode::Production ? "prod" : "otp") << ':';
  for (const Bytes& r : rows) os << bytes_to_hex(r);
  return os.str();
}

GarbledTable GarbledTable::deserialize(const std::string& s) {
  if (s.rfind("GT1:", 0) != 0) throw std::invalid_argument("garbled table: bad magic");
  size_t colon = s.find(':', 4);
  if (colon == std::string::npos) throw std::invalid_argument("garbled table: missing header");
  std::istringstream hs(s.substr(4, colon - 4));
  GarbledTable t;
  char c1, c2, c3, c4;
  std::string mode;
  if (!(hs >> t.arity >> c1 >> t.key_bits >> c2 >> t.out_len >> c3 >> t.tag_bytes >> c4) || c1 != ',' ||
      c2 != ',' || c3 != ',' || c4 != ',')
    throw std::invalid_argument("garbled table: bad header");
  std::getline(hs, mode);
  if (mode == "prod")
    t.mode = GarbleMode::Production;
  else if (mode == "otp")
    t.mode = GarbleMode::TestOtp;
  else
    throw std::invalid_argument("garbled table: bad mode");
  check_arity(t.arity);
  if (t.key_bits < 0 || t.tag_bytes < 0) throw std::invalid_argument("garbled table: bad header");
  Bytes body = hex_to_bytes(s.substr(colon + 1));
  size_t rl = t.row_len(), nrows = size_t{1} << t.arity;
  if (body.size() != rl * nrows) throw std::invalid_argument("garbled table: body length mismatch");
  t.rows.resize(nrows);
  for (size_t r = 0; r < nrows; ++r) t.rows[r].assign(body.begin() + r * rl, body.begin() + (r + 1) * rl);
  return t;
}

GarbleOptions resolve_options(GarbleOptions opt, size_t out_len) {
  if (opt.tag_bytes < 0) throw std::invalid_argument("garble: negative tag length");
  if (opt.mode == GarbleMode::TestOtp)
    opt.key_bits = static_cast<int>(8 * (out_len + static_cast<size_t>(opt.tag_bytes)));
  if (opt.key_bits < 0) throw std::invalid_argument("garble: negative key length");
  return opt;
}

std::pair<std::vector<LabelPair>, GarbledTable> garble(const std::vector<Bytes>& f, GarbleOptions opt,
                                                       BitSource& coins) {
  if (f.empty() || (f.size() & (f.size() - 1))) throw std::invalid_argument("garble: table size not 2^k");
  int k = std::countr_zero(f.size());
  check_arity(k);
  size_t out_len = f[0].size();
  for (const Bytes& y : f)
    if (y.size() != out_len) throw std::invalid_argument("garble: ragged output table");
  opt = resolve_options(opt, out_len);

  std::vector<LabelPair> pairs(static_cast<size_t>(k));
  for (auto& p : pairs) {
    bool mask = opt.mask_pp ? coins.next_bit() : false;
    p.zero = {random_bits(static_cast<size_t>(opt.key_bits), coins), mask};
    p.one = {random_bits(static_cast<size_t>(opt.key_bits), coins), !mask};
  }

  GarbledTable t = empty_table(k, out_len, opt);
  for (uint64_t x = 0; x < f.size(); ++x) {
    std::vector<const BitVec*> keys;
    size_t row = 0;
    for (int i = 0; i < k; ++i) {
      const Label& l = pairs[i][(x >> i) & 1];
      keys.push_back(&l.key);
      row |= static_cast<size_t>(l.pp) << i;
    }
    Bytes plain = f[x];
    plain.resize(t.row_len(), 0);
    Bytes pad = row_pad(t, row, keys);
    for (size_t j = 0; j < plain.size(); ++j) plain[j] ^= pad[j];
    t.rows[row] = std::move(plain);
  }
  return {std::move(pairs), std::move(t)};
}

std::pair<std::vector<LabelPair>, GarbledTable> garble(const std::vector<Bytes>& f, GarbleOptions opt, Rng& rng) {
  RngBits coins(rng);
  return garble(f, opt, coins);
}

Bytes geval(const GarbledTable& table, const std::vector<Label>& labels) {
  if (labels.size() != static_cast<size_t>(table.arity)) throw std::invalid_argument("geval: wrong label count");
  if (table.rows.size() != size_t{1} << table.arity) throw std::invalid_argument("geval: malformed table");
  std::vector<const BitVec*> keys;
  size_t row = 0;
  for (int i = 0; i < table.arity; ++i) {
    if (labels[i].key.size() != static_cast<size_t>(table.key_bits))
      throw std::invalid_argument("geval: wrong label length");
    keys.push_back(&labels[i].key);
    row |= static_cast<size_t>(labels[i].pp) << i;
  }
  Bytes plain = table.rows[row];
  if (plain.size() != table.row_len()) throw std::invalid_argument("geval: malformed row");
  Bytes pad = row_pad(table, row, keys);
  uint8_t tag_acc = 0;
  for (size_t j = 0; j < plain.size(); ++j) {
    plain[j] ^= pad[j];
    if (j >= table.out_len) tag_acc |= plain[j];
  }
  if (tag_acc) throw GarbleAuthError();
  plain.resize(table.out_len);
  return plain;
}

std::pair<std::vector<Label>, GarbledTable> gsim(int k, const Bytes& y, GarbleOptions opt, BitSource& coins) {
  check_arity(k);
  opt = resolve_options(opt, y.size());
  std::vector<Label> labels(static_cast<size_t>(k));
  size_t row = 0;
  std::vector<const BitVec*> keys;
  for (int i = 0; i < k; ++i) {
    labels[i].pp = coins.next_bit();
    labels[i].key = random_bits(static_cast<size_t>(opt.key_bits), coins);
    row |= static_cast<size_t>(labels[i].pp) << i;
    keys.push_back(&labels[i].key);
  }
  GarbledTable t = empty_table(k, y.size(), opt);
  for (size_t r = 0; r < t.rows.size(); ++r) {
    if (r == row) {
      Bytes plain = y;
      plain.resize(t.row_len(), 0);
      Bytes pad = row_pad(t, r, keys);
      for (size_t j = 0; j < plain.size(); ++j) plain[j] ^= pad[j];
      t.rows[r] = std::move(plain);
    } else {
      t.rows[r] = random_bytes(t.row_len(), coins);
    }
  }
  return {std::move(labels), std::move(t)};
}

std::pair<std::vector<Label>, GarbledTable> gsim(int k, const Bytes& y, GarbleOptions opt, Rng& rng) {
  RngBits coins(rng);
  return gsim(k, y, opt, coins);
}

std::vector<Label> select_labels(const std::vector<LabelPair>& pairs, uint64_t x) {
  std::vector<Label> out;
  out.reserve(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) out.push_back(pairs[i][(x >> i) & 1]);
  return out;
}

}  // namespace qmpc
