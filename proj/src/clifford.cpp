// SPDX-License-Identifier: Apache-2.0
#include "qmpc/clifford.hpp"

#include <algorithm>
#include <cstring>

namespace qmpc {

// ---- PauliOp ----

PauliOp::PauliOp(BitVec x, BitVec z, int phase) : x_(std::move(x)), z_(std::move(z)) {
  if (x_.size() != z_.size()) throw std::invalid_argument("PauliOp: x/z length mismatch");
  set_phase(phase);
}

PauliOp PauliOp::single(size_t n, size_t q, char p) {
  PauliOp out(n);
  switch (p) {
    case 'I': break;
    case 'X': out.x_.set(q, true); break;
    case 'Z': out.z_.set(q, true); break;
    case 'Y':
      out.x_.set(q, true);
      out.z_.set(q, true);
      out.phase_ = 1;
      break;
    default: throw std::invalid_argument("PauliOp::single: bad letter");
  }
  return out;
}

PauliOp PauliOp::from_xz(const BitVec& x, const BitVec& z) {
  PauliOp p(x, z, 0);
  p.set_phase(static_cast<int>((x & z).popcount()));
  return p;
}

PauliOp PauliOp::from_string(const std::string& s) {
  size_t pos = 0;
  int sign = 0;  // power of i
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    if (s[pos] == '-') sign = 2;
    ++pos;
  }
  if (pos < s.size() && s[pos] == 'i') {
    sign += 1;
    ++pos;
  }
  std::string body = s.substr(pos);
  PauliOp out(body.size());
  int ys = 0;
  for (size_t q = 0; q < body.size(); ++q) {
    char c = body[q];
    if (c == 'X' || c == 'Y') out.x_.set(q, true);
    if (c == 'Z' || c == 'Y') out.z_.set(q, true);
    if (c == 'Y') ++ys;
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z' && c != '_')
      throw std::invalid_argument("PauliOp::from_string: bad letter");
  }
  out.set_phase(sign + ys);
  return out;
}

int PauliOp::hermitian_sign() const {
  int r = ((phase_ - static_cast<int>((x_ & z_).popcount())) % 4 + 4) % 4;
  if (r == 0) return 1;
  if (r == 2) return -1;
  throw std::logic_error("PauliOp::hermitian_sign on non-Hermitian operator");
}

char PauliOp::letter(size_t q) const {
  bool xb = x_.get(q), zb = z_.get(q);
  return xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
}

PauliOp& PauliOp::operator*=(const PauliOp& o) {
  if (n() != o.n()) throw std::invalid_argument("pauli_mul: size mismatch");
  int ph = phase_ + o.phase_ + (z_.dot(o.x_) ? 2 : 0);
  x_ ^= o.x_;
  z_ ^= o.z_;
  set_phase(ph);
  return *this;
}

PauliOp PauliOp::operator*(const PauliOp& o) const {
  PauliOp r = *this;
  r *= o;
  return r;
}

std::string PauliOp::to_string() const {
  int r = ((phase_ - static_cast<int>((x_ & z_).popcount())) % 4 + 4) % 4;
  static const char* prefix[] = {"+", "+i", "-", "-i"};
  std::string s = prefix[r];
  for (size_t q = 0; q < n(); ++q) s.push_back(letter(q));
  return s;
}

PauliOp PauliOp::restrict(std::span<const int> qubits) const {
  PauliOp out(qubits.size());
  for (size_t k = 0; k < qubits.size(); ++k) {
    out.x_.set(k, x_.get(qubits[k]));
    out.z_.set(k, z_.get(qubits[k]));
  }
  return out;
}

void PauliOp::embed_from(const PauliOp& local, std::span<const int> qubits) {
  for (size_t k = 0; k < qubits.size(); ++k) {
    x_.set(qubits[k], local.x_.get(k));
    z_.set(qubits[k], local.z_.get(k));
  }
  add_phase(local.phase_);
}

void PauliOp::conj_h(size_t q) {
  bool xb = x_.get(q), zb = z_.get(q);
  if (xb && zb) add_phase(2);
  x_.set(q, zb);
  z_.set(q, xb);
}

void PauliOp::conj_s(size_t q) {
  if (x_.get(q)) {
    z_.flip(q);
    add_phase(1);
  }
}

void PauliOp::conj_sdg(size_t q) {
  if (x_.get(q)) {
    z_.flip(q);
    add_phase(3);
  }
}

void PauliOp::conj_cnot(size_t c, size_t t) {
  if (x_.get(c)) x_.flip(t);
  if (z_.get(t)) z_.flip(c);
}

void PauliOp::conj_cz(size_t a, size_t b) {
  conj_h(b);
  conj_cnot(a, b);
  conj_h(b);
}

void PauliOp::conj_swap(size_t a, size_t b) {
  bool xa = x_.get(a), za = z_.get(a);
  x_.set(a, x_.get(b));
  z_.set(a, z_.get(b));
  x_.set(b, xa);
  z_.set(b, za);
}

void PauliOp::conj_gate(const Gate& g) {
  switch (g.kind) {
    case GateKind::H: conj_h(g.q0); break;
    case GateKind::S: conj_s(g.q0); break;
    case GateKind::Sdg: conj_sdg(g.q0); break;
    case GateKind::X:
      if (z_.get(g.q0)) add_phase(2);
      break;
    case GateKind::Z:
      if (x_.get(g.q0)) add_phase(2);
      break;
    case GateKind::Y:
      if (x_.get(g.q0) != z_.get(g.q0)) add_phase(2);
      break;
    case GateKind::CNOT: conj_cnot(g.q0, g.q1); break;
    case GateKind::CZ: conj_cz(g.q0, g.q1); break;
    case GateKind::SWAP: conj_swap(g.q0, g.q1); break;
    case GateKind::T:
    case GateKind::Tdg: throw std::invalid_argument("T is not a Clifford gate");
  }
}

PauliOp pauli_mul(const PauliOp& p, const PauliOp& q) { return p * q; }

PauliOp random_pauli(size_t n, Rng& rng) {
  BitVec x(n), z(n);
  for (size_t q = 0; q < n; ++q) {
    x.set(q, rng.bit());
    z.set(q, rng.bit());
  }
  return PauliOp::from_xz(x, z);
}

std::vector<int> iota_vec(int begin, int count) {
  std::vector<int> v(count);
  for (int i = 0; i < count; ++i) v[i] = begin + i;
  return v;
}

// ---- CliffordOp ----

CliffordOp::CliffordOp(size_t n) {
  images_.reserve(2 * n);
  for (size_t q = 0; q < n; ++q) images_.push_back(PauliOp::single(n, q, 'X'));
  for (size_t q = 0; q < n; ++q) images_.push_back(PauliOp::single(n, q, 'Z'));
}

CliffordOp CliffordOp::from_images(std::vector<PauliOp> images) {
  CliffordOp c;
  c.images_ = std::move(images);
  if (c.images_.size() % 2) throw InvalidTableau("odd number of generator images");
  if (!c.is_valid()) throw InvalidTableau("tableau violates the symplectic form");
  return c;
}

CliffordOp CliffordOp::from_images_unchecked(std::vector<PauliOp> images) {
  CliffordOp c;
  c.images_ = std::move(images);
  return c;
}

CliffordOp CliffordOp::from_gates(size_t n, const GateSeq& gates) {
  CliffordOp c(n);
  for (const Gate& g : gates) c.then_gate(g);
  return c;
}

CliffordOp CliffordOp::from_pauli(const PauliOp& p) {
  size_t n = p.n();
  CliffordOp c(n);
  for (size_t q = 0; q < n; ++q) {
    if (p.z().get(q)) c.images_[q].add_phase(2);
    if (p.x().get(q)) c.images_[n + q].add_phase(2);
  }
  return c;
}

CliffordOp CliffordOp::permutation(const std::vector<int>& dest) {
  size_t n = dest.size();
  std::vector<bool> seen(n, false);
  for (int d : dest) {
    if (d < 0 || static_cast<size_t>(d) >= n || seen[d]) throw std::invalid_argument("not a permutation");
    seen[d] = true;
  }
  CliffordOp c;
  c.images_.resize(2 * n);
  for (size_t q = 0; q < n; ++q) {
    c.images_[q] = PauliOp::single(n, dest[q], 'X');
    c.images_[n + q] = PauliOp::single(n, dest[q], 'Z');
  }
  return c;
}

CliffordOp CliffordOp::from_linear_map(const F2Matrix& m) {
  return from_gates(m.rows(), linear_map_to_circuit(m));
}

PauliOp CliffordOp::conjugate(const PauliOp& p) const {
  size_t nn = n();
  if (p.n() != nn) throw std::invalid_argument("conjugate: size mismatch");
  PauliOp r(nn);
  r.set_phase(p.phase());
  for (size_t q = 0; q < nn; ++q)
    if (p.x().get(q)) r *= images_[q];
  for (size_t q = 0; q < nn; ++q)
    if (p.z().get(q)) r *= images_[nn + q];
  return r;
}

void CliffordOp::then_gate(const Gate& g) {
  for (PauliOp& p : images_) p.conj_gate(g);
}

bool CliffordOp::is_valid() const {
  size_t nn = n();
  for (const PauliOp& p : images_)
    if (p.n() != nn || !p.is_hermitian()) return false;
  for (size_t a = 0; a < 2 * nn; ++a)
    for (size_t b = a + 1; b < 2 * nn; ++b) {
      bool should_anticommute = (a < nn && b == a + nn);
      if (images_[a].commutes(images_[b]) == should_anticommute) return false;
    }
  return true;
}

static const char kClifHeader[] = "CLIFv1";

std::vector<uint8_t> CliffordOp::serialize() const {
  size_t nn = n();
  size_t rb = (nn + 7) / 8;
  std::vector<uint8_t> out(kClifHeader, kClifHeader + 6);
  out.push_back(static_cast<uint8_t>(nn >> 8));
  out.push_back(static_cast<uint8_t>(nn & 0xff));
  for (const PauliOp& p : images_) {
    for (const BitVec* bits : {&p.x(), &p.z()}) {
      std::vector<uint8_t> row(rb, 0);
      for (size_t q = 0; q < nn; ++q)
        if (bits->get(q)) row[q / 8] |= static_cast<uint8_t>(0x80 >> (q % 8));
      out.insert(out.end(), row.begin(), row.end());
    }
    out.push_back(static_cast<uint8_t>(p.phase()));
  }
  return out;
}

CliffordOp CliffordOp::deserialize(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kClifHeader, 6) != 0)
    throw InvalidTableau("missing CLIFv1 header");
  size_t nn = (static_cast<size_t>(bytes[6]) << 8) | bytes[7];
  size_t rb = (nn + 7) / 8;
  if (bytes.size() != 8 + 2 * nn * (2 * rb + 1)) throw InvalidTableau("CLIFv1 payload length mismatch");
  std::vector<PauliOp> images;
  size_t pos = 8;
  for (size_t r = 0; r < 2 * nn; ++r) {
    BitVec x(nn), z(nn);
    for (BitVec* bits : {&x, &z}) {
      for (size_t q = 0; q < nn; ++q) bits->set(q, bytes[pos + q / 8] & (0x80 >> (q % 8)));
      for (size_t q = nn; q < rb * 8; ++q)
        if (bytes[pos + q / 8] & (0x80 >> (q % 8))) throw InvalidTableau("nonzero padding bits");
      pos += rb;
    }
    uint8_t ph = bytes[pos++];
    if (ph > 3) throw InvalidTableau("phase byte out of range");
    images.emplace_back(std::move(x), std::move(z), ph);
  }
  return from_images(std::move(images));
}

PauliOp conjugate(const CliffordOp& c, const PauliOp& p) { return c.conjugate(p); }

CliffordOp compose(const CliffordOp& c1, const CliffordOp& c2) {
  if (c1.n() != c2.n()) throw std::invalid_argument("compose: size mismatch");
  std::vector<PauliOp> imgs;
  imgs.reserve(c2.images().size());
  for (const PauliOp& p : c2.images()) imgs.push_back(c1.conjugate(p));
  return CliffordOp::from_images_unchecked(std::move(imgs));
}

// Matrix whose row k holds the [x|z] bits of generator image k.
static F2Matrix symplectic_matrix(const CliffordOp& c) {
  size_t n = c.n();
  F2Matrix m(2 * n, 2 * n);
  for (size_t k = 0; k < 2 * n; ++k) {
    const PauliOp& p = c.images()[k];
    for (size_t q = 0; q < n; ++q) {
      m.set(k, q, p.x().get(q));
      m.set(k, n + q, p.z().get(q));
    }
  }
  return m;
}

static CliffordOp from_symplectic_matrix(const F2Matrix& m) {
  size_t n = m.rows() / 2;
  std::vector<PauliOp> imgs;
  for (size_t k = 0; k < 2 * n; ++k) {
    BitVec x = m.row(k).slice(0, n), z = m.row(k).slice(n, n);
    imgs.push_back(PauliOp::from_xz(x, z));
  }
  return CliffordOp::from_images_unchecked(std::move(imgs));
}

CliffordOp inverse(const CliffordOp& c) {
  CliffordOp base = from_symplectic_matrix(symplectic_matrix(c).inverse());
  // base o c is conjugation by some Pauli, which is its own inverse.
  CliffordOp signs = compose(base, c);
  return compose(signs, base);
}

CliffordOp tensor(const CliffordOp& a, const CliffordOp& b) {
  size_t n = a.n() + b.n();
  std::vector<int> qa = iota_vec(0, static_cast<int>(a.n()));
  std::vector<int> qb = iota_vec(static_cast<int>(a.n()), static_cast<int>(b.n()));
  return compose(embed(a, n, qa), embed(b, n, qb));
}

CliffordOp embed(const CliffordOp& c, size_t n, std::span<const int> qubits) {
  if (qubits.size() != c.n()) throw std::invalid_argument("embed: qubit count mismatch");
  std::vector<PauliOp> imgs = CliffordOp(n).images();
  size_t k = c.n();
  for (size_t j = 0; j < k; ++j) {
    PauliOp px(n), pz(n);
    px.embed_from(c.image_x(j), qubits);
    pz.embed_from(c.image_z(j), qubits);
    imgs[qubits[j]] = px;
    imgs[n + qubits[j]] = pz;
  }
  return CliffordOp::from_images_unchecked(std::move(imgs));
}

// ---- sampling ----

namespace {

bool anticommute(const PauliOp& a, const PauliOp& b) { return !a.commutes(b); }

void add_vec(PauliOp& a, const PauliOp& b) {
  a.x() ^= b.x();
  a.z() ^= b.z();
}

// Symplectic basis (a_0, b_0, a_1, b_1, ...) of the span of a nondegenerate list.
std::vector<PauliOp> symplectic_basis(std::vector<PauliOp> vecs) {
  std::vector<PauliOp> out;
  out.reserve(vecs.size());
  auto drop = [&vecs](size_t i) {
    if (i + 1 != vecs.size()) std::swap(vecs[i], vecs.back());
    vecs.pop_back();
  };
  for (;;) {
    std::erase_if(vecs, [](const PauliOp& v) { return v.is_identity_up_to_phase(); });
    if (vecs.empty()) return out;
    size_t j = 1;
    while (j < vecs.size() && !anticommute(vecs[0], vecs[j])) ++j;
    if (j == vecs.size()) throw std::logic_error("symplectic_basis: degenerate span");
    PauliOp b = std::move(vecs[j]);
    drop(j);
    PauliOp a = std::move(vecs[0]);
    drop(0);
    for (PauliOp& u : vecs) {
      bool ub = anticommute(u, b), ua = anticommute(u, a);
      if (ub) add_vec(u, a);
      if (ua) add_vec(u, b);
    }
    out.push_back(std::move(a));
    out.push_back(std::move(b));
  }
}

PauliOp combination(const std::vector<PauliOp>& basis, const std::vector<bool>& coeffs, size_t n) {
  PauliOp v(n);
  for (size_t j = 0; j < basis.size(); ++j)
    if (coeffs[j]) add_vec(v, basis[j]);
  return v;
}

}  // namespace

// Images of (X_i, Z_i) are drawn one pair at a time: a uniform nonzero vector of
// the remaining symplectic space, then a uniform partner with form value 1, then
// recursion on the symplectic complement of the pair.
CliffordOp sample_clifford(size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_clifford: n must be positive");
  std::vector<PauliOp> basis;
  for (size_t q = 0; q < n; ++q) {
    basis.push_back(PauliOp::single(n, q, 'X'));
    basis.push_back(PauliOp::single(n, q, 'Z'));
  }
  std::vector<PauliOp> xs(n), zs(n);
  for (size_t i = 0; i < n; ++i) {
    size_t dim = basis.size();
    std::vector<bool> c(dim);
    PauliOp v;
    do {
      for (size_t j = 0; j < dim; ++j) c[j] = rng.bit();
      v = combination(basis, c, n);
    } while (v.is_identity_up_to_phase());
    PauliOp w;
    do {
      for (size_t j = 0; j < dim; ++j) c[j] = rng.bit();
      w = combination(basis, c, n);
    } while (!anticommute(v, w));
    std::vector<PauliOp> rest;
    for (PauliOp u : basis) {
      bool uw = anticommute(u, w), uv = anticommute(u, v);
      if (uw) add_vec(u, v);
      if (uv) add_vec(u, w);
      rest.push_back(std::move(u));
    }
    basis = symplectic_basis(std::move(rest));
    xs[i] = std::move(v);
    zs[i] = std::move(w);
  }
  std::vector<PauliOp> imgs;
  imgs.reserve(2 * n);
  for (auto* half : {&xs, &zs})
    for (PauliOp& p : *half) {
      PauliOp h = PauliOp::from_xz(p.x(), p.z());
      if (rng.bit()) h.add_phase(2);
      imgs.push_back(std::move(h));
    }
  return CliffordOp::from_images_unchecked(std::move(imgs));
}

// ---- synthesis ----

namespace {

struct Reducer {
  CliffordOp c;
  GateSeq applied;
  size_t n;

  void apply(GateKind k, int a, int b = -1) {
    Gate g{k, a, b};
    c.then_gate(g);
    applied.push_back(g);
  }
  const PauliOp& destab(size_t q) const { return c.image_x(q); }
  const PauliOp& stab(size_t q) const { return c.image_z(q); }

  void set_qubit_x_true(size_t q) {
    if (destab(q).x().get(q)) return;
    for (size_t i = q; i < n; ++i)
      if (destab(q).x().get(i)) {
        apply(GateKind::SWAP, static_cast<int>(i), static_cast<int>(q));
        return;
      }
    for (size_t i = q; i < n; ++i)
      if (destab(q).z().get(i)) {
        apply(GateKind::H, static_cast<int>(i));
        if (i != q) apply(GateKind::SWAP, static_cast<int>(i), static_cast<int>(q));
        return;
      }
    throw InvalidTableau("to_gates: destabilizer row has no support");
  }

  void set_row_x_zero(size_t q) {
    for (size_t i = q + 1; i < n; ++i)
      if (destab(q).x().get(i)) apply(GateKind::CNOT, static_cast<int>(q), static_cast<int>(i));
    bool any_z = false;
    for (size_t i = q; i < n; ++i) any_z = any_z || destab(q).z().get(i);
    if (any_z) {
      if (!destab(q).z().get(q)) apply(GateKind::S, static_cast<int>(q));
      for (size_t i = q + 1; i < n; ++i)
        if (destab(q).z().get(i)) apply(GateKind::CNOT, static_cast<int>(i), static_cast<int>(q));
      apply(GateKind::S, static_cast<int>(q));
    }
  }

  void set_row_z_zero(size_t q) {
    for (size_t i = q + 1; i < n; ++i)
      if (stab(q).z().get(i)) apply(GateKind::CNOT, static_cast<int>(i), static_cast<int>(q));
    bool any_x = false;
    for (size_t i = q; i < n; ++i) any_x = any_x || stab(q).x().get(i);
    if (any_x) {
      apply(GateKind::H, static_cast<int>(q));
      for (size_t i = q + 1; i < n; ++i)
        if (stab(q).x().get(i)) apply(GateKind::CNOT, static_cast<int>(q), static_cast<int>(i));
      if (stab(q).z().get(q)) apply(GateKind::S, static_cast<int>(q));
      apply(GateKind::H, static_cast<int>(q));
    }
  }
};

}  // namespace

GateSeq to_gates(const CliffordOp& c) {
  if (!c.is_valid()) throw InvalidTableau("to_gates: malformed tableau");
  Reducer r{c, {}, c.n()};
  for (size_t q = 0; q < r.n; ++q) {
    r.set_qubit_x_true(q);
    r.set_row_x_zero(q);
    r.set_row_z_zero(q);
  }
  for (size_t q = 0; q < r.n; ++q) {
    if (r.destab(q).hermitian_sign() < 0) r.apply(GateKind::Z, static_cast<int>(q));
    if (r.stab(q).hermitian_sign() < 0) r.apply(GateKind::X, static_cast<int>(q));
  }
  // r.applied reduces c to the identity; the realising circuit is its inverse.
  GateSeq out;
  for (auto it = r.applied.rbegin(); it != r.applied.rend(); ++it) {
    if (it->kind == GateKind::S) {
      out.push_back({GateKind::S, it->q0});
      out.push_back({GateKind::Z, it->q0});
    } else {
      out.push_back(*it);
    }
  }
  return out;
}

}  // namespace qmpc
