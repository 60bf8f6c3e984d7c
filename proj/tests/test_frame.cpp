#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <map>

#include "fewbit/common.hpp"
#include "fewbit/frame.hpp"

using namespace fewbit;

namespace {

FrameSpec full_scale_spec(Modulation mod = Modulation::Qam16Gray) {
    return FrameSpec::make(512, 2, 4, 448, 64, 128, mod);
}

cvec random_symbols(const FrameSpec& spec, uint64_t seed) {
    Rng rng(seed);
    std::vector<uint8_t> bits(spec.coded_bits());
    for (auto& b : bits) b = static_cast<uint8_t>(rng.next_u64() & 1);
    return map_bits(spec, bits);
}

}  // namespace

TEST_CASE("full-scale frame dimensions and unknown count") {
    FrameSpec spec = full_scale_spec();
    Frame f = build_frame(spec, random_symbols(spec, 1));
    CHECK(f.x.rows == 512);
    CHECK(f.x.cols == 6);
    int unknown = 0;
    for (int k = 0; k < 6; ++k)
        for (int m = 0; m < 512; ++m)
            if (!f.is_known(m, k)) ++unknown;
    CHECK(unknown == 1792);
    CHECK(f.unknown_count() == 1792);
}

TEST_CASE("pilot-only frame is fully known") {
    FrameSpec spec = FrameSpec::make(64, 2, 0, 48, 16, 16, Modulation::QpskGray);
    Frame f = build_frame(spec, {});
    for (int k = 0; k < spec.k(); ++k)
        for (int m = 0; m < spec.m; ++m) CHECK(f.is_known(m, k));
}

TEST_CASE("pilot blocks share the CP tail") {
    FrameSpec spec = full_scale_spec();
    Frame f = build_frame(spec, random_symbols(spec, 2));
    for (int k = 1; k < spec.k_p; ++k)
        for (int i = 0; i < spec.n_c; ++i)
            CHECK(f.x(spec.m - spec.n_c + i, k) == f.x(spec.m - spec.n_c + i, 0));
    // tail of the pilot block is the CEF prefix -g_a
    cvec blk0 = pilot_block(spec, 0);
    cvec blk1 = pilot_block(spec, 1);
    for (int i = 0; i < spec.n_c; ++i)
        CHECK(blk0[spec.m - spec.n_c + i] == blk1[spec.m - spec.n_c + i]);
}

TEST_CASE("guards are identical across data blocks") {
    FrameSpec spec = full_scale_spec();
    Frame f = build_frame(spec, random_symbols(spec, 3));
    for (int k = spec.k_p + 1; k < spec.k(); ++k)
        for (int i = 0; i < spec.n_g; ++i)
            CHECK(f.x(spec.n_d + i, k) == f.x(spec.n_d + i, spec.k_p));
}

TEST_CASE("pi/2-BPSK rotation pattern") {
    FrameSpec spec = FrameSpec::make(8, 1, 1, 6, 2, 2, Modulation::Pi2Bpsk);
    std::vector<uint8_t> bits = {0, 1, 0, 1, 0, 0};
    cvec s = map_bits(spec, bits);
    CHECK(s[0] == cplx(1, 0));
    CHECK(s[1] == cplx(0, -1));  // j * (-1)
    CHECK(s[2] == cplx(-1, 0));
    CHECK(s[3] == cplx(0, 1));  // -j * (-1)
    CHECK(s[4] == cplx(1, 0));
    CHECK(s[5] == cplx(0, 1));
}

TEST_CASE("16-QAM all-zero bits map to the Gray corner") {
    int a = 0;
    cvec alpha = make_alphabet(Modulation::Qam16Gray, a);
    REQUIRE(a == 4);
    const double s = 1.0 / std::sqrt(10.0);
    CHECK(alpha[0] == cplx(-3 * s, -3 * s));
    double p = 0.0;
    for (const cplx& v : alpha) p += std::norm(v);
    CHECK(p / 16.0 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("bit mapping round trip is the identity") {
    for (Modulation mod : {Modulation::Pi2Bpsk, Modulation::QpskGray, Modulation::Qam16Gray}) {
        FrameSpec spec = FrameSpec::make(64, 1, 5, 48, 16, 16, mod);
        Rng rng(7);
        std::vector<uint8_t> bits(spec.coded_bits());
        for (auto& b : bits) b = static_cast<uint8_t>(rng.next_u64() & 1);
        CHECK(unmap_hard(spec, map_bits(spec, bits)) == bits);
    }
}

TEST_CASE("known/unknown partition matches spec arithmetic for random specs") {
    Rng rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const int quarter_log = 1 + rng.uniform_int(5);
        const int m = 4 * (1 << quarter_log);
        const int ng_log = 1 + rng.uniform_int(quarter_log + 1);
        const int n_g = 1 << ng_log;
        if (n_g >= m) continue;
        const int n_d = m - n_g;
        const int k_p = 1 + rng.uniform_int(3);
        const int k_d = rng.uniform_int(4);
        const int n_c = 1 + rng.uniform_int(m / 4);
        FrameSpec spec = FrameSpec::make(m, k_p, k_d, n_d, n_g, n_c, Modulation::QpskGray);
        Frame f = build_frame(spec, random_symbols(spec, 100 + trial));
        int known = 0;
        for (size_t i = 0; i < f.known.size(); ++i) known += f.known[i] ? 1 : 0;
        CHECK(known == spec.m * spec.k() - spec.k_d * spec.n_d);
        for (int k = 0; k < spec.k_p; ++k)
            for (int mm = 0; mm < spec.m; ++mm) CHECK(f.is_known(mm, k));
    }
}

TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS(FrameSpec::make(64, 2, 4, 40, 16, 16, Modulation::QpskGray));  // M != N_D+N_G
    CHECK_THROWS(FrameSpec::make(64, 2, 4, 48, 16, 80, Modulation::QpskGray));  // N_C > M
    FrameSpec spec = FrameSpec::make(64, 2, 4, 48, 16, 16, Modulation::QpskGray);
    CHECK_THROWS(build_frame(spec, cvec(7)));  // wrong data length
    std::vector<uint8_t> bad(spec.coded_bits(), 2);
    CHECK_THROWS(map_bits(spec, bad));
}

TEST_CASE("frame spec config parsing and CSV export") {
    std::map<std::string, std::string> kv{{"frame.m", "64"},  {"frame.kp", "2"}, {"frame.kd", "4"},
                                          {"frame.nd", "48"}, {"frame.ng", "16"}, {"frame.nc", "16"},
                                          {"modulation", "qpsk-gray"}};
    FrameSpec spec = frame_spec_from_kv(kv);
    CHECK(spec.m == 64);
    CHECK(spec.a == 2);
    Frame f = build_frame(spec, random_symbols(spec, 4));
    const std::string path = "frame_export_test.csv";
    export_frame_csv(f, path);
    std::FILE* fp = std::fopen(path.c_str(), "r");
    REQUIRE(fp != nullptr);
    char header[64];
    REQUIRE(std::fgets(header, sizeof(header), fp) != nullptr);
    CHECK(std::string(header).rfind("row,col,re,im,known", 0) == 0);
    std::fclose(fp);
    std::remove(path.c_str());
}
