#include <msbm/rng.hpp>

#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace msbm;

TEST_SUITE("rng")
{
    TEST_CASE("Philox4x32-10 known-answer vectors")
    {
        using philox::Counter;
        using philox::Key;
        CHECK(philox::block(Counter{0, 0, 0, 0}, Key{0, 0}) == Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
        CHECK(philox::block(Counter{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, Key{0xffffffff, 0xffffffff})
              == Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
        CHECK(philox::block(Counter{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, Key{0xa4093822, 0x299f31d0})
              == Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
    }

    TEST_CASE("counter uniforms are addressable and in range")
    {
        const double a = counter_uniform(42, Stream::pair_word, 17, 0);
        CHECK(a == counter_uniform(42, Stream::pair_word, 17, 0));
        CHECK(a != counter_uniform(43, Stream::pair_word, 17, 0));
        CHECK(a != counter_uniform(42, Stream::block_label, 17, 0));
        CHECK(a != counter_uniform(42, Stream::pair_word, 18, 0));
        CHECK(a != counter_uniform(42, Stream::pair_word, 17, 1));

        double sum = 0.0;
        const int N = 100000;
        for (int i = 0; i < N; ++i) {
            const double u = counter_uniform(1, Stream::restart_init, static_cast<std::uint64_t>(i), 0);
            CHECK_MESSAGE((u >= 0.0 && u < 1.0), "u = " << u);
            sum += u;
        }
        CHECK(std::abs(sum / N - 0.5) < 4 * std::sqrt(1.0 / 12 / N));
    }

    TEST_CASE("uniform uses the top 53 bits of the first two words")
    {
        const auto block = philox::block({5, 0, 3, static_cast<std::uint32_t>(Stream::kmeans)}, philox::key_from_seed(9));
        const std::uint64_t bits = (std::uint64_t{block[0]} << 32 | block[1]) >> 11;
        CHECK(counter_uniform(9, Stream::kmeans, 5, 3) == static_cast<double>(bits) * 0x1.0p-53);
    }

    TEST_CASE("categorical draws skip zero-probability categories")
    {
        const std::vector<double> p{0.0, 0.5, 0.0, 0.5, 0.0};
        CHECK(sample_categorical(p, 0.0) == 1);
        CHECK(sample_categorical(p, 0.49) == 1);
        CHECK(sample_categorical(p, 0.5) == 3);
        CHECK(sample_categorical(p, 0.999999999) == 3);
        const std::vector<double> last{0.3, 0.7};
        CHECK(sample_categorical(last, std::nextafter(1.0, 0.0)) == 1);
    }

    TEST_CASE("engine streams")
    {
        PhiloxEngine a(7, Stream::restart_init, 2), b(7, Stream::restart_init, 2), c(7, Stream::restart_init, 3);
        std::vector<std::uint64_t> xa, xb, xc;
        for (int i = 0; i < 10; ++i) {
            xa.push_back(a());
            xb.push_back(b());
            xc.push_back(c());
        }
        CHECK(xa == xb);
        CHECK(xa != xc);

        PhiloxEngine e(3, Stream::kmeans, 0);
        double mean = 0.0;
        const int N = 50000;
        for (int i = 0; i < N; ++i) {
            const double x = e.exponential();
            CHECK(x > 0.0);
            mean += x / N;
        }
        CHECK(std::abs(mean - 1.0) < 4 / std::sqrt(static_cast<double>(N)));
        for (int i = 0; i < 1000; ++i) {
            const double u = e.uniform_open();
            CHECK((u > 0.0 && u < 1.0));
        }
    }

    TEST_CASE("seed mixing separates nearby inputs")
    {
        std::set<std::uint64_t> seen;
        for (std::uint64_t s = 0; s < 100; ++s)
            for (std::uint64_t salt = 0; salt < 100; ++salt) seen.insert(mix_seed(s, salt));
        CHECK(seen.size() == 10000);
        CHECK(mix_seed(1, 2) == mix_seed(1, 2));
    }
}
