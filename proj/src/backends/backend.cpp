#include "msrag/backends/backend.hpp"

#include <cmath>

namespace msrag::backends {

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    const std::size_t n = std::min(a.values.size(), b.values.size());
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dot += a.values[i] * b.values[i];
    }
    for (double v : a.values) norm_a += v * v;
    for (double v : b.values) norm_b += v * v;
    if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

} // namespace msrag::backends
