#include "fewbit/coding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "fewbit/frame.hpp"

namespace fewbit {

namespace {

// dense GF(2) rows packed into 64-bit words
struct BitRows {
    int n = 0;
    int words = 0;
    std::vector<uint64_t> data;

    BitRows(int rows, int cols) : n(cols), words((cols + 63) / 64), data(static_cast<size_t>(rows) * words, 0) {}
    uint64_t* row(int r) { return data.data() + static_cast<size_t>(r) * words; }
    const uint64_t* row(int r) const { return data.data() + static_cast<size_t>(r) * words; }
    void set(int r, int c) { row(r)[c >> 6] ^= 0ULL; row(r)[c >> 6] |= (1ULL << (c & 63)); }
    bool get(int r, int c) const { return (row(r)[c >> 6] >> (c & 63)) & 1ULL; }
    void xor_rows(int dst, int src) {
        uint64_t* d = row(dst);
        const uint64_t* s = row(src);
        for (int w = 0; w < words; ++w) d[w] ^= s[w];
    }
};

}  // namespace

CodeSpec CodeSpec::from_rows(std::vector<std::vector<int>> check_rows, int n) {
    if (n <= 0) throw std::invalid_argument("CodeSpec: empty code");
    const int m = static_cast<int>(check_rows.size());
    CodeSpec code;
    code.n_c = n;
    code.check_neighbors = std::move(check_rows);
    code.var_neighbors.assign(n, {});
    for (int r = 0; r < m; ++r) {
        std::sort(code.check_neighbors[r].begin(), code.check_neighbors[r].end());
        auto last = std::unique(code.check_neighbors[r].begin(), code.check_neighbors[r].end());
        code.check_neighbors[r].erase(last, code.check_neighbors[r].end());
        for (int v : code.check_neighbors[r]) {
            if (v < 0 || v >= n) throw std::invalid_argument("CodeSpec: variable index out of range");
            code.var_neighbors[v].push_back(r);
        }
    }

    // RREF over GF(2): pivot columns become parity positions, the rest carry
    // information bits
    BitRows h(m, n);
    for (int r = 0; r < m; ++r)
        for (int v : code.check_neighbors[r]) h.set(r, v);

    std::vector<int> pivot_row_of_col(n, -1);
    int rank = 0;
    for (int c = 0; c < n && rank < m; ++c) {
        int pr = -1;
        for (int r = rank; r < m; ++r)
            if (h.get(r, c)) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        if (pr != rank)
            for (int w = 0; w < h.words; ++w) std::swap(h.row(pr)[w], h.row(rank)[w]);
        for (int r = 0; r < m; ++r)
            if (r != rank && h.get(r, c)) h.xor_rows(r, rank);
        pivot_row_of_col[c] = rank;
        ++rank;
    }

    code.n_b = n - rank;
    if (code.n_b <= 0) throw std::invalid_argument("CodeSpec: code has no information bits");

    std::vector<int> col_to_info(n, -1);
    for (int c = 0; c < n; ++c) {
        if (pivot_row_of_col[c] >= 0) {
            code.parity_positions.push_back(c);
        } else {
            col_to_info[c] = static_cast<int>(code.info_positions.size());
            code.info_positions.push_back(c);
        }
    }
    code.parity_expr.resize(code.parity_positions.size());
    for (size_t i = 0; i < code.parity_positions.size(); ++i) {
        const int r = pivot_row_of_col[code.parity_positions[i]];
        for (int c = 0; c < n; ++c)
            if (col_to_info[c] >= 0 && h.get(r, c)) code.parity_expr[i].push_back(col_to_info[c]);
    }
    return code;
}

std::vector<uint8_t> encode(const CodeSpec& code, const std::vector<uint8_t>& info) {
    if (static_cast<int>(info.size()) != code.n_b)
        throw std::invalid_argument("encode: info length mismatch");
    std::vector<uint8_t> cw(code.n_c, 0);
    for (int i = 0; i < code.n_b; ++i) {
        if (info[i] > 1) throw std::invalid_argument("encode: non-binary input");
        cw[code.info_positions[i]] = info[i];
    }
    for (size_t i = 0; i < code.parity_positions.size(); ++i) {
        uint8_t p = 0;
        for (int j : code.parity_expr[i]) p ^= info[j];
        cw[code.parity_positions[i]] = p;
    }
    return cw;
}

bool parity_check(const CodeSpec& code, const std::vector<uint8_t>& codeword) {
    if (static_cast<int>(codeword.size()) != code.n_c)
        throw std::invalid_argument("parity_check: length mismatch");
    for (const auto& row : code.check_neighbors) {
        uint8_t s = 0;
        for (int v : row) s ^= codeword[v];
        if (s) return false;
    }
    return true;
}

CodeSpec CodeSpec::from_alist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("from_alist: cannot open " + path);
    int n, m;
    if (!(in >> n >> m)) throw std::runtime_error("from_alist: malformed header");
    int max_col, max_row;
    if (!(in >> max_col >> max_row)) throw std::runtime_error("from_alist: malformed header");
    std::vector<int> col_deg(n), row_deg(m);
    for (int i = 0; i < n; ++i) in >> col_deg[i];
    for (int i = 0; i < m; ++i) in >> row_deg[i];
    // per-column check lists, 1-based, zero-padded to max_col
    std::vector<std::vector<int>> rows(m);
    for (int c = 0; c < n; ++c) {
        for (int e = 0; e < max_col; ++e) {
            int chk;
            if (!(in >> chk)) throw std::runtime_error("from_alist: truncated column list");
            if (chk == 0) continue;
            if (chk < 1 || chk > m) throw std::runtime_error("from_alist: check index out of range");
            rows[chk - 1].push_back(c);
        }
    }
    // the row lists are redundant with the column lists; skip whatever remains
    return from_rows(std::move(rows), n);
}

void CodeSpec::write_alist(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_alist: cannot open " + path);
    const int m = num_checks();
    size_t max_col = 0, max_row = 0;
    for (const auto& v : var_neighbors) max_col = std::max(max_col, v.size());
    for (const auto& c : check_neighbors) max_row = std::max(max_row, c.size());
    out << n_c << ' ' << m << '\n' << max_col << ' ' << max_row << '\n';
    for (int v = 0; v < n_c; ++v) out << var_neighbors[v].size() << (v + 1 < n_c ? ' ' : '\n');
    for (int c = 0; c < m; ++c) out << check_neighbors[c].size() << (c + 1 < m ? ' ' : '\n');
    for (int v = 0; v < n_c; ++v) {
        for (size_t e = 0; e < max_col; ++e)
            out << (e < var_neighbors[v].size() ? var_neighbors[v][e] + 1 : 0)
                << (e + 1 < max_col ? ' ' : '\n');
    }
    for (int c = 0; c < m; ++c) {
        for (size_t e = 0; e < max_row; ++e)
            out << (e < check_neighbors[c].size() ? check_neighbors[c][e] + 1 : 0)
                << (e + 1 < max_row ? ' ' : '\n');
    }
}

namespace {

int gf2_rank(const std::vector<std::vector<int>>& rows, int n) {
    const int m = static_cast<int>(rows.size());
    BitRows h(m, n);
    for (int r = 0; r < m; ++r)
        for (int v : rows[r]) h.set(r, v);
    int rank = 0;
    for (int c = 0; c < n && rank < m; ++c) {
        int pr = -1;
        for (int r = rank; r < m; ++r)
            if (h.get(r, c)) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        if (pr != rank)
            for (int w = 0; w < h.words; ++w) std::swap(h.row(pr)[w], h.row(rank)[w]);
        for (int r = rank + 1; r < m; ++r)
            if (h.get(r, c)) h.xor_rows(r, rank);
        ++rank;
    }
    return rank;
}

std::vector<std::vector<int>> peg_construct(int n, int m, const std::vector<int>& col_deg, Rng& rng) {
    std::vector<std::vector<int>> check_vars(m), var_checks(n);
    std::vector<int> check_deg(m, 0);
    std::vector<int> visited(m, 0);
    int stamp = 0;

    for (int v = 0; v < n; ++v) {
        for (int e = 0; e < col_deg[v]; ++e) {
            int pick = -1;
            if (var_checks[v].empty()) {
                // first edge: lowest-degree check overall
                int best = INT32_MAX;
                std::vector<int> cands;
                for (int c = 0; c < m; ++c) {
                    if (check_deg[c] < best) {
                        best = check_deg[c];
                        cands.clear();
                    }
                    if (check_deg[c] == best) cands.push_back(c);
                }
                pick = cands[rng.uniform_int(static_cast<int>(cands.size()))];
            } else {
                // BFS tree from v; prefer checks outside the tree, falling
                // back to the deepest layer reached
                ++stamp;
                std::vector<int> frontier = var_checks[v];
                for (int c : frontier) visited[c] = stamp;
                std::vector<int> last_layer = frontier;
                std::vector<int> var_seen(n, 0);
                var_seen[v] = 1;
                while (true) {
                    std::vector<int> next;
                    for (int c : frontier)
                        for (int vv : check_vars[c]) {
                            if (var_seen[vv]) continue;
                            var_seen[vv] = 1;
                            for (int cc : var_checks[vv])
                                if (visited[cc] != stamp) {
                                    visited[cc] = stamp;
                                    next.push_back(cc);
                                }
                        }
                    if (next.empty()) break;
                    last_layer = next;
                    frontier = std::move(next);
                }
                int covered = 0;
                for (int c = 0; c < m; ++c)
                    if (visited[c] == stamp) ++covered;
                std::vector<int> cands;
                int best = INT32_MAX;
                auto consider = [&](int c) {
                    if (check_deg[c] < best) {
                        best = check_deg[c];
                        cands.clear();
                    }
                    if (check_deg[c] == best) cands.push_back(c);
                };
                if (covered < m) {
                    for (int c = 0; c < m; ++c)
                        if (visited[c] != stamp) consider(c);
                } else {
                    for (int c : last_layer) consider(c);
                }
                pick = cands[rng.uniform_int(static_cast<int>(cands.size()))];
            }
            check_vars[pick].push_back(v);
            var_checks[v].push_back(pick);
            ++check_deg[pick];
        }
    }
    return check_vars;
}

}  // namespace

CodeSpec CodeSpec::make_default(int n, uint64_t seed) {
    if (n < 8 || n % 2 != 0) throw std::invalid_argument("make_default: length must be even and >= 8");
    const int m = n / 2;
    // column weights cycle 3,2,4,3 -> average 3
    std::vector<int> col_deg(n);
    const int cycle[4] = {3, 2, 4, 3};
    for (int v = 0; v < n; ++v) col_deg[v] = cycle[v & 3];

    for (int attempt = 0; attempt < 32; ++attempt) {
        Rng rng(mix_seed(seed, 0x1dbc, attempt));
        auto rows = peg_construct(n, m, col_deg, rng);
        if (gf2_rank(rows, n) == m) return from_rows(std::move(rows), n);
    }
    throw std::runtime_error("make_default: could not build a full-rank parity matrix");
}

Interleaver Interleaver::make(int n, uint64_t seed) {
    Interleaver il;
    il.perm.resize(n);
    std::iota(il.perm.begin(), il.perm.end(), 0);
    Rng rng(mix_seed(seed, 0x71ea));
    for (int i = n - 1; i > 0; --i) std::swap(il.perm[i], il.perm[rng.uniform_int(i + 1)]);
    il.inv.resize(n);
    for (int i = 0; i < n; ++i) il.inv[il.perm[i]] = i;
    return il;
}

DecodeResult decode_soft(const CodeSpec& code, const BitBeliefs& priors, int max_ldpc_iters) {
    if (priors.size() != code.n_c) throw std::invalid_argument("decode_soft: prior length mismatch");
    if (priors.tag == BeliefTag::Posterior)
        throw std::invalid_argument("decode_soft: expected prior/extrinsic beliefs, got posterior");

    const int m = code.num_checks();
    DecodeResult res;
    res.posterior.llr = priors.llr;
    res.posterior.tag = BeliefTag::Posterior;
    res.hard_bits.resize(code.n_c);

    auto harden = [&]() {
        for (int v = 0; v < code.n_c; ++v) res.hard_bits[v] = res.posterior.llr[v] < 0.0 ? 1 : 0;
    };
    harden();
    if (parity_check(code, res.hard_bits)) {
        res.parity_ok = true;
        res.iters_used = 0;
    } else {
        // edge storage: messages indexed per (check, position-in-check)
        std::vector<std::vector<double>> c2v(m), v2c(m);
        for (int c = 0; c < m; ++c) {
            c2v[c].assign(code.check_neighbors[c].size(), 0.0);
            v2c[c].assign(code.check_neighbors[c].size(), 0.0);
        }
        // position of check c in var v's neighbor list -> (c, e) lookup
        for (int c = 0; c < m; ++c)
            for (size_t e = 0; e < code.check_neighbors[c].size(); ++e)
                v2c[c][e] = priors.llr[code.check_neighbors[c][e]];

        std::vector<double> fwd, bwd;
        for (int it = 1; it <= max_ldpc_iters; ++it) {
            // check update: forward/backward partial products of tanh(l/2)
            for (int c = 0; c < m; ++c) {
                const size_t deg = code.check_neighbors[c].size();
                if (deg == 0) continue;
                fwd.assign(deg, 1.0);
                bwd.assign(deg, 1.0);
                for (size_t e = 1; e < deg; ++e)
                    fwd[e] = fwd[e - 1] * std::tanh(0.5 * v2c[c][e - 1]);
                for (size_t e = deg - 1; e-- > 0;)
                    bwd[e] = bwd[e + 1] * std::tanh(0.5 * v2c[c][e + 1]);
                for (size_t e = 0; e < deg; ++e) {
                    double t = fwd[e] * bwd[e];
                    t = std::clamp(t, -0.9999999999999, 0.9999999999999);
                    c2v[c][e] = 2.0 * std::atanh(t);
                }
            }
            // variable update
            for (int v = 0; v < code.n_c; ++v) res.posterior.llr[v] = priors.llr[v];
            for (int c = 0; c < m; ++c)
                for (size_t e = 0; e < code.check_neighbors[c].size(); ++e)
                    res.posterior.llr[code.check_neighbors[c][e]] += c2v[c][e];
            for (int c = 0; c < m; ++c)
                for (size_t e = 0; e < code.check_neighbors[c].size(); ++e)
                    v2c[c][e] = res.posterior.llr[code.check_neighbors[c][e]] - c2v[c][e];

            res.iters_used = it;
            harden();
            if (parity_check(code, res.hard_bits)) {
                res.parity_ok = true;
                break;
            }
        }
    }
    for (double& l : res.posterior.llr) l = BitBeliefs::clamp_llr(l);
    res.info_bits.resize(code.n_b);
    for (int i = 0; i < code.n_b; ++i) res.info_bits[i] = res.hard_bits[code.info_positions[i]];
    return res;
}

void bits_to_symbol_pmf(const double* llr_group, int a, double* pmf_out) {
    const int n = 1 << a;
    uint8_t bits[16];
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        bits_of_symbol(j, a, bits);
        double lg = 0.0;
        for (int i = 0; i < a; ++i) {
            // log Pr{c=b} with llr = log(P0/P1)
            const double s = bits[i] ? llr_group[i] : -llr_group[i];
            lg -= std::log1p(std::exp(s));
        }
        pmf_out[j] = std::exp(lg);
        sum += pmf_out[j];
    }
    for (int j = 0; j < n; ++j) pmf_out[j] /= sum;
}

void symbol_pmf_to_bit_llrs(const double* pmf, int a, double* llr_out) {
    const int n = 1 << a;
    uint8_t bits[16];
    double p1[16] = {0};
    for (int j = 0; j < n; ++j) {
        bits_of_symbol(j, a, bits);
        for (int i = 0; i < a; ++i)
            if (bits[i]) p1[i] += pmf[j];
    }
    for (int i = 0; i < a; ++i) llr_out[i] = BitBeliefs::clamp_llr(std::log((1.0 - p1[i]) / p1[i]));
}

BitBeliefs extrinsic_divide(const BitBeliefs& posterior, const BitBeliefs& prior) {
    if (posterior.tag != BeliefTag::Posterior)
        throw std::invalid_argument("extrinsic_divide: first argument must be posterior beliefs");
    if (prior.tag == BeliefTag::Posterior)
        throw std::invalid_argument("extrinsic_divide: second argument must be prior beliefs");
    if (posterior.size() != prior.size())
        throw std::invalid_argument("extrinsic_divide: length mismatch");
    BitBeliefs out;
    out.tag = BeliefTag::Extrinsic;
    out.llr.resize(posterior.llr.size());
    for (size_t i = 0; i < out.llr.size(); ++i)
        out.llr[i] = BitBeliefs::clamp_llr(posterior.llr[i] - prior.llr[i]);
    return out;
}

}  // namespace fewbit
