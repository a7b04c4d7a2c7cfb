#include "schro/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace schro::fft {

namespace {

std::mutex g_mu;

struct Cache {
    std::map<std::tuple<std::vector<int>, int, int, bool>, fftw_plan> blocks;
    std::map<std::tuple<std::vector<std::size_t>, int, int, bool>, fftw_plan> axes;
    ~Cache() {
        for (auto& [k, p] : blocks) fftw_destroy_plan(p);
        for (auto& [k, p] : axes) fftw_destroy_plan(p);
    }
};

Cache& cache() {
    static Cache c;
    return c;
}

fftw_complex* fc(const cplx* p) { return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p)); }

}  // namespace

void transform(const std::vector<int>& shape, int howmany, int sign, const cplx* in, cplx* out) {
    fftw_plan plan;
    {
        std::lock_guard lk(g_mu);
        const bool inplace = in == out;
        auto key = std::make_tuple(shape, howmany, sign, inplace);
        auto it = cache().blocks.find(key);
        if (it == cache().blocks.end()) {
            int dist = 1;
            for (int n : shape) dist *= n;
            CVec a(static_cast<std::size_t>(dist) * howmany), b(a.size());
            fftw_plan p = fftw_plan_many_dft(static_cast<int>(shape.size()), shape.data(), howmany, fc(a.data()),
                                             nullptr, 1, dist, fc(inplace ? a.data() : b.data()), nullptr, 1, dist, sign,
                                             FFTW_ESTIMATE | FFTW_UNALIGNED);
            if (!p) fail(ErrorKind::Numerical, "fftw plan creation failed");
            it = cache().blocks.emplace(key, p).first;
        }
        plan = it->second;
    }
    fftw_execute_dft(plan, fc(in), fc(out));
}

void transform_axis(const std::vector<std::size_t>& shape, int axis, int sign, const cplx* in, cplx* out) {
    fftw_plan plan;
    {
        std::lock_guard lk(g_mu);
        const bool inplace = in == out;
        auto key = std::make_tuple(shape, axis, sign, inplace);
        auto it = cache().axes.find(key);
        if (it == cache().axes.end()) {
            std::size_t outer = 1, inner = 1;
            for (int a = 0; a < axis; ++a) outer *= shape[a];
            for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
            const int n = static_cast<int>(shape[axis]);
            fftw_iodim dim{n, static_cast<int>(inner), static_cast<int>(inner)};
            fftw_iodim hm[2] = {{static_cast<int>(outer), static_cast<int>(inner * n), static_cast<int>(inner * n)},
                                {static_cast<int>(inner), 1, 1}};
            CVec a(outer * inner * n), b(a.size());
            fftw_plan p = fftw_plan_guru_dft(1, &dim, 2, hm, fc(a.data()), fc(inplace ? a.data() : b.data()), sign,
                                             FFTW_ESTIMATE | FFTW_UNALIGNED);
            if (!p) fail(ErrorKind::Numerical, "fftw plan creation failed");
            it = cache().axes.emplace(key, p).first;
        }
        plan = it->second;
    }
    fftw_execute_dft(plan, fc(in), fc(out));
}

}  // namespace schro::fft
