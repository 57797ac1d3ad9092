#include "sls2/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "sls2/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sls2 {

namespace {

// Value with the word that attained it; ties prefer the lexicographically
// smaller word so reductions are deterministic under any partitioning.
struct Best {
    double value = -1.0;
    std::uint64_t index = 0;

    void consider(double v, std::uint64_t i) {
        if (v > value || (v == value && i < index)) {
            value = v;
            index = i;
        }
    }
    void merge(const Best& o) { consider(o.value, o.index); }
};

struct LayerStats {
    Best norm; // max |P_w|
    double rho_value = -1.0;
    std::uint64_t rho_index = 0;
};

// Indices into `prev` are word prefixes; entry p*N+j of the result is
// members[j] * prev[p]. Returns the max norm and max spectral radius of the
// new layer with attaining indices.
LayerStats extend_layer_serial(const std::vector<Mat2>& members, const std::vector<Mat2>& prev,
                               std::vector<Mat2>& next) {
    const std::size_t n_members = members.size();
    LayerStats stats;
    Best rho;
    for (std::size_t p = 0; p < prev.size(); ++p) {
        for (std::size_t j = 0; j < n_members; ++j) {
            std::uint64_t idx = p * n_members + j;
            next[idx] = members[j] * prev[p];
            stats.norm.consider(operator_norm(next[idx]), idx);
            rho.consider(spectral_radius(next[idx]), idx);
        }
    }
    stats.rho_value = rho.value;
    stats.rho_index = rho.index;
    return stats;
}

LayerStats extend_layer_parallel(const std::vector<Mat2>& members, const std::vector<Mat2>& prev,
                                 std::vector<Mat2>& next) {
#ifndef _OPENMP
    return extend_layer_serial(members, prev, next);
#else
    const std::size_t n_members = members.size();
    LayerStats stats;
    Best rho;
#pragma omp parallel
    {
        Best local_norm, local_rho;
#pragma omp for schedule(static) nowait
        for (std::int64_t ps = 0; ps < static_cast<std::int64_t>(prev.size()); ++ps) {
            auto p = static_cast<std::size_t>(ps);
            for (std::size_t j = 0; j < n_members; ++j) {
                std::uint64_t idx = p * n_members + j;
                next[idx] = members[j] * prev[p];
                local_norm.consider(operator_norm(next[idx]), idx);
                local_rho.consider(spectral_radius(next[idx]), idx);
            }
        }
#pragma omp critical
        {
            stats.norm.merge(local_norm);
            rho.merge(local_rho);
        }
    }
    stats.rho_value = rho.value;
    stats.rho_index = rho.index;
    return stats;
#endif
}

std::vector<int> word_from_index(std::uint64_t index, int length, int n_members) {
    std::vector<int> word(static_cast<std::size_t>(length), 0);
    if (n_members <= 1) return word;
    for (int pos = length - 1; pos >= 0; --pos) {
        word[static_cast<std::size_t>(pos)] = static_cast<int>(index % n_members);
        index /= static_cast<std::uint64_t>(n_members);
    }
    return word;
}

struct ScanResult {
    std::vector<double> bn;
    double lower = 0.0;
    std::vector<int> witness_word;
    bool exact = true;
};

ScanResult enumerate_words(const MatrixSet& set, const EnumerationOptions& opts) {
    if (set.members.empty()) throw std::invalid_argument("enumeration needs a nonempty set");
    if (opts.depth < 1) throw std::invalid_argument("enumeration depth must be at least 1");
    const std::size_t n_members = set.members.size();

    if (!opts.fast) {
        // Layer n costs N^n multiplications; layer 1 is free. Total the full
        // scan first so the exception reports the true requirement.
        const std::size_t cap = std::numeric_limits<std::size_t>::max();
        std::size_t required = 0;
        std::size_t layer = n_members;
        for (int n = 2; n <= opts.depth; ++n) {
            if (layer > cap / n_members) { required = cap; break; }
            layer *= n_members;
            if (required > cap - layer) { required = cap; break; }
            required += layer;
        }
        if (required > opts.budget) throw WorkBudgetExceeded(required, opts.budget);
    }

    ScanResult result;
    result.exact = !opts.fast;

    // Layer 1: the members themselves, word index = member index.
    std::vector<Mat2> layer = set.members;
    std::vector<std::uint64_t> prefixes; // only used in fast mode (pruned indices)
    Best norm1;
    double best_rho = -1.0;
    int best_rho_len = 1;
    std::uint64_t best_rho_index = 0;
    for (std::size_t j = 0; j < layer.size(); ++j) {
        norm1.consider(operator_norm(layer[j]), j);
        double rho = spectral_radius(layer[j]);
        if (rho > best_rho) {
            best_rho = rho;
            best_rho_index = j;
        }
    }
    result.bn.push_back(norm1.value);

    std::size_t spent = 0;
    for (int n = 2; n <= opts.depth; ++n) {
        if (opts.fast) {
            // Words below the current lower bound's growth cannot attain the
            // running maximum at their own length; dropping them keeps the
            // bracket useful but makes later b_n values approximate.
            double cutoff = std::pow(std::max(best_rho, 0.0), double(n - 1));
            std::vector<Mat2> kept;
            std::vector<std::uint64_t> kept_prefix;
            std::size_t argmax = 0;
            double max_norm = -1.0;
            for (std::size_t p = 0; p < layer.size(); ++p) {
                double norm = operator_norm(layer[p]);
                if (norm > max_norm) {
                    max_norm = norm;
                    argmax = p;
                }
                if (norm >= cutoff) {
                    kept.push_back(layer[p]);
                    kept_prefix.push_back(prefixes.empty() ? p : prefixes[p]);
                }
            }
            if (kept.empty() && !layer.empty()) {
                kept.push_back(layer[argmax]);
                kept_prefix.push_back(prefixes.empty() ? argmax : prefixes[argmax]);
            }
            layer.swap(kept);
            prefixes.swap(kept_prefix);
        }

        std::size_t next_size = layer.size() * n_members;
        spent += next_size;
        if (spent > opts.budget) throw WorkBudgetExceeded(spent, opts.budget);

        std::vector<Mat2> next(next_size);
        LayerStats stats = opts.exec == Exec::Parallel
                               ? extend_layer_parallel(set.members, layer, next)
                               : extend_layer_serial(set.members, layer, next);
        layer.swap(next);

        // Translate pruned-layer indices back to full word indices.
        auto full_index = [&](std::uint64_t idx) {
            if (prefixes.empty()) return idx;
            return prefixes[idx / n_members] * n_members + idx % n_members;
        };

        result.bn.push_back(stats.norm.value);
        double rho_n = std::pow(std::max(stats.rho_value, 0.0), 1.0 / double(n));
        if (rho_n > best_rho) { // equal values keep the earlier, shorter witness
            best_rho = rho_n;
            best_rho_len = n;
            best_rho_index = full_index(stats.rho_index);
        }
        if (!prefixes.empty()) {
            // Keep prefixes aligned with the (unpruned) new layer.
            std::vector<std::uint64_t> expanded(layer.size());
            for (std::size_t i = 0; i < layer.size(); ++i) expanded[i] = full_index(i);
            prefixes.swap(expanded);
        }
    }

    result.lower = std::max(best_rho, 0.0);
    result.witness_word = word_from_index(best_rho_index, best_rho_len, static_cast<int>(n_members));
    return result;
}

} // namespace

RateSequence rate_sequence(const MatrixSet& set, const EnumerationOptions& opts) {
    ScanResult scan = enumerate_words(set, opts);
    return {std::move(scan.bn), opts.depth, scan.exact};
}

JsrBounds jsr_bounds(const MatrixSet& set, const EnumerationOptions& opts) {
    ScanResult scan = enumerate_words(set, opts);
    JsrBounds out;
    out.depth = opts.depth;
    out.exact = scan.exact;
    out.lower = scan.lower;
    out.witness_word = std::move(scan.witness_word);
    out.upper = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scan.bn.size(); ++i) {
        out.upper = std::min(out.upper, std::pow(scan.bn[i], 1.0 / double(i + 1)));
    }
    return out;
}

bool assert_unit_jsr(const MatrixSet& set, const EnumerationOptions& opts, double band,
                     JsrBounds* bounds_out) {
    JsrBounds b = jsr_bounds(set, opts);
    if (bounds_out) *bounds_out = b;
    bool intersects = b.lower <= 1.0 + band && b.upper >= 1.0 - band;
    return intersects && b.lower <= 1.0 + band;
}

} // namespace sls2
