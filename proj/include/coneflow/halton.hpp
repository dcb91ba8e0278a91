#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace coneflow {

// Low-discrepancy Halton sequence; `seed` offsets the start index so that
// two runs with the same seed produce identical samples.
class Halton {
public:
    explicit Halton(std::size_t dims, std::uint64_t seed = 0)
        : dims_(dims), index_(17 + 101 * seed) {}

    std::vector<double> next() {
        ++index_;
        std::vector<double> p(dims_);
        for (std::size_t j = 0; j < dims_; ++j) p[j] = radical_inverse(index_, prime(j));
        return p;
    }

private:
    static std::uint64_t prime(std::size_t j) {
        static const std::uint64_t primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                               43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101};
        return primes[j % (sizeof(primes) / sizeof(primes[0]))];
    }

    static double radical_inverse(std::uint64_t i, std::uint64_t base) {
        double f = 1.0, r = 0.0;
        while (i > 0) {
            f /= double(base);
            r += f * double(i % base);
            i /= base;
        }
        return r;
    }

    std::size_t dims_;
    std::uint64_t index_;
};

}  // namespace coneflow
