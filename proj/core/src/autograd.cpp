// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/autograd.hpp"

#include <algorithm>
#include <cmath>

#include "specsep/error.hpp"

namespace specsep {

namespace {

void
expect_rank(const Tensor& t, int rank, const char* op)
{
    if (t.rank() != rank)
        fail(ErrorKind::InvalidArgument,
             std::string(op) + ": expected rank " + std::to_string(rank)
                 + " tensor, got " + shape_string(t.shape()));
}

void
expect(bool cond, const char* op, const std::string& what)
{
    if (!cond)
        fail(ErrorKind::InvalidArgument, std::string(op) + ": " + what);
}

}  // namespace

Tape::Id
Tape::leaf(Tensor value, bool requires_grad)
{
    Node n;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    m_nodes.push_back(std::move(n));
    return Id(m_nodes.size() - 1);
}

Tape::Id
Tape::push(Tensor value, std::vector<Id> inputs)
{
    Node n;
    n.value = std::move(value);
    for (Id i : inputs)
        n.requires_grad = n.requires_grad || node(i).requires_grad;
    m_nodes.push_back(std::move(n));
    return Id(m_nodes.size() - 1);
}

Tensor&
Tape::grad_ref(Id id)
{
    Node& n = node(id);
    if (n.grad.size() != n.value.size() || n.grad.shape() != n.value.shape())
        n.grad = Tensor(n.value.shape(), 0.0);
    return n.grad;
}

void
Tape::backward(Id target)
{
    expect(node(target).value.size() == 1, "backward",
           "target must have one element");
    for (Node& n : m_nodes)
        n.grad = Tensor();
    grad_ref(target)[0] = 1.0;
    for (Id id = target; id >= 0; --id) {
        Node& n = node(id);
        if (n.requires_grad && n.backward && n.grad.size() != 0)
            n.backward();
    }
}

Tape::Id
Tape::conv3x3(Id xi, Id wi, Id bi)
{
    const Tensor& x = value(xi);
    const Tensor& w = value(wi);
    const Tensor& b = value(bi);
    expect_rank(x, 4, "conv3x3");
    expect_rank(w, 4, "conv3x3");
    expect_rank(b, 1, "conv3x3");
    const int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    const int O = w.dim(0);
    expect(w.dim(1) == C && w.dim(2) == 3 && w.dim(3) == 3 && b.dim(0) == O,
           "conv3x3", "weight " + shape_string(w.shape())
                          + " does not fit input " + shape_string(x.shape()));

    const std::size_t plane = std::size_t(H) * W;
    Tensor y({N, O, H, W});
    for (int n = 0; n < N; ++n) {
        for (int o = 0; o < O; ++o) {
            double* yp = y.ptr() + (std::size_t(n) * O + o) * plane;
            std::fill(yp, yp + plane, b[std::size_t(o)]);
            for (int c = 0; c < C; ++c) {
                const double* xp = x.ptr() + (std::size_t(n) * C + c) * plane;
                const double* wp = w.ptr() + (std::size_t(o) * C + c) * 9;
                for (int ky = 0; ky < 3; ++ky) {
                    for (int kx = 0; kx < 3; ++kx) {
                        const double wv = wp[ky * 3 + kx];
                        const int dx = kx - 1;
                        const int x0 = std::max(0, -dx);
                        const int x1 = std::min(W, W - dx);
                        for (int r = 0; r < H; ++r) {
                            const int sr = r + ky - 1;
                            if (sr < 0 || sr >= H)
                                continue;
                            double* yr = yp + std::size_t(r) * W;
                            const double* xr = xp + std::size_t(sr) * W + dx;
                            for (int col = x0; col < x1; ++col)
                                yr[col] += wv * xr[col];
                        }
                    }
                }
            }
        }
    }
    const Id out = push(std::move(y), {xi, wi, bi});
    node(out).backward = [this, out, xi, wi, bi, N, C, H, W, O, plane] {
        const Tensor& g = node(out).grad;
        const Tensor& x = value(xi);
        const Tensor& w = value(wi);
        const bool need_x = requires_grad(xi);
        const bool need_w = requires_grad(wi);
        if (requires_grad(bi)) {
            Tensor& gb = grad_ref(bi);
            for (int n = 0; n < N; ++n)
                for (int o = 0; o < O; ++o) {
                    const double* gp
                        = g.ptr() + (std::size_t(n) * O + o) * plane;
                    double s = 0.0;
                    for (std::size_t i = 0; i < plane; ++i)
                        s += gp[i];
                    gb[std::size_t(o)] += s;
                }
        }
        if (!need_x && !need_w)
            return;
        Tensor* gx = need_x ? &grad_ref(xi) : nullptr;
        Tensor* gw = need_w ? &grad_ref(wi) : nullptr;
        for (int n = 0; n < N; ++n) {
            for (int o = 0; o < O; ++o) {
                const double* gp = g.ptr() + (std::size_t(n) * O + o) * plane;
                for (int c = 0; c < C; ++c) {
                    const std::size_t xoff = (std::size_t(n) * C + c) * plane;
                    const double* xp = x.ptr() + xoff;
                    const std::size_t woff = (std::size_t(o) * C + c) * 9;
                    for (int ky = 0; ky < 3; ++ky) {
                        for (int kx = 0; kx < 3; ++kx) {
                            const double wv = w[woff + ky * 3 + kx];
                            const int dx = kx - 1;
                            const int x0 = std::max(0, -dx);
                            const int x1 = std::min(W, W - dx);
                            double acc = 0.0;
                            for (int r = 0; r < H; ++r) {
                                const int sr = r + ky - 1;
                                if (sr < 0 || sr >= H)
                                    continue;
                                const double* gr = gp + std::size_t(r) * W;
                                const std::size_t srow
                                    = std::size_t(sr) * W + dx;
                                if (gw) {
                                    const double* xr = xp + srow;
                                    for (int col = x0; col < x1; ++col)
                                        acc += gr[col] * xr[col];
                                }
                                if (gx) {
                                    double* gxr = gx->ptr() + xoff + srow;
                                    for (int col = x0; col < x1; ++col)
                                        gxr[col] += wv * gr[col];
                                }
                            }
                            if (gw)
                                (*gw)[woff + ky * 3 + kx] += acc;
                        }
                    }
                }
            }
        }
    };
    return out;
}

Tape::Id
Tape::relu(Id xi)
{
    const Tensor& x = value(xi);
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = x[i] > 0.0 ? x[i] : 0.0;
    const Id out = push(std::move(y), {xi});
    node(out).backward = [this, out, xi] {
        const Tensor& g = node(out).grad;
        const Tensor& x = value(xi);
        Tensor& gx = grad_ref(xi);
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] > 0.0)
                gx[i] += g[i];
    };
    return out;
}

Tape::Id
Tape::avg_pool(Id xi, int f)
{
    const Tensor& x = value(xi);
    expect_rank(x, 4, "avg_pool");
    const int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    expect(f >= 1 && H % f == 0 && W % f == 0, "avg_pool",
           "window " + std::to_string(f) + " does not divide "
               + shape_string(x.shape()));
    const int h = H / f, w = W / f;
    const double k = 1.0 / (double(f) * f);
    Tensor y({N, C, h, w});
    for (int nc = 0; nc < N * C; ++nc)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                double s = 0.0;
                for (int a = 0; a < f; ++a)
                    for (int b = 0; b < f; ++b)
                        s += x[(std::size_t(nc) * H + i * f + a) * W + j * f
                               + b];
                y[(std::size_t(nc) * h + i) * w + j] = s * k;
            }
    const Id out = push(std::move(y), {xi});
    node(out).backward = [this, out, xi, N, C, H, W, h, w, f, k] {
        const Tensor& g = node(out).grad;
        Tensor& gx = grad_ref(xi);
        for (int nc = 0; nc < N * C; ++nc)
            for (int i = 0; i < h; ++i)
                for (int j = 0; j < w; ++j) {
                    const double v = g[(std::size_t(nc) * h + i) * w + j] * k;
                    for (int a = 0; a < f; ++a)
                        for (int b = 0; b < f; ++b)
                            gx[(std::size_t(nc) * H + i * f + a) * W + j * f
                               + b]
                                += v;
                }
    };
    return out;
}

Tape::Id
Tape::global_avg_pool(Id xi)
{
    const Tensor& x = value(xi);
    expect_rank(x, 4, "global_avg_pool");
    const int N = x.dim(0), C = x.dim(1);
    const std::size_t plane = std::size_t(x.dim(2)) * x.dim(3);
    const double k = 1.0 / double(plane);
    Tensor y({N, C});
    for (std::size_t nc = 0; nc < std::size_t(N) * C; ++nc) {
        double s = 0.0;
        for (std::size_t i = 0; i < plane; ++i)
            s += x[nc * plane + i];
        y[nc] = s * k;
    }
    const Id out = push(std::move(y), {xi});
    node(out).backward = [this, out, xi, N, C, plane, k] {
        const Tensor& g = node(out).grad;
        Tensor& gx = grad_ref(xi);
        for (std::size_t nc = 0; nc < std::size_t(N) * C; ++nc)
            for (std::size_t i = 0; i < plane; ++i)
                gx[nc * plane + i] += g[nc] * k;
    };
    return out;
}

Tape::Id
Tape::to_tokens(Id xi)
{
    const Tensor& x = value(xi);
    expect_rank(x, 4, "to_tokens");
    const int N = x.dim(0), C = x.dim(1);
    const int L = x.dim(2) * x.dim(3);
    Tensor y({N, L, C});
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c)
            for (int l = 0; l < L; ++l)
                y[(std::size_t(n) * L + l) * C + c]
                    = x[(std::size_t(n) * C + c) * L + l];
    const Id out = push(std::move(y), {xi});
    node(out).backward = [this, out, xi, N, C, L] {
        const Tensor& g = node(out).grad;
        Tensor& gx = grad_ref(xi);
        for (int n = 0; n < N; ++n)
            for (int c = 0; c < C; ++c)
                for (int l = 0; l < L; ++l)
                    gx[(std::size_t(n) * C + c) * L + l]
                        += g[(std::size_t(n) * L + l) * C + c];
    };
    return out;
}

Tape::Id
Tape::from_tokens(Id xi, int h, int w)
{
    const Tensor& x = value(xi);
    expect_rank(x, 3, "from_tokens");
    const int N = x.dim(0), L = x.dim(1), C = x.dim(2);
    expect(h * w == L, "from_tokens", "grid does not match token count");
    Tensor y({N, C, h, w});
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c)
            for (int l = 0; l < L; ++l)
                y[(std::size_t(n) * C + c) * L + l]
                    = x[(std::size_t(n) * L + l) * C + c];
    const Id out = push(std::move(y), {xi});
    node(out).backward = [this, out, xi, N, C, L] {
        const Tensor& g = node(out).grad;
        Tensor& gx = grad_ref(xi);
        for (int n = 0; n < N; ++n)
            for (int c = 0; c < C; ++c)
                for (int l = 0; l < L; ++l)
                    gx[(std::size_t(n) * L + l) * C + c]
                        += g[(std::size_t(n) * C + c) * L + l];
    };
    return out;
}

Tape::Id
Tape::matmul_nt(Id ai, Id bi)
{
    const Tensor& a = value(ai);
    const Tensor& b = value(bi);
    expect_rank(a, 3, "matmul_nt");
    expect_rank(b, 3, "matmul_nt");
    const int N = a.dim(0), L = a.dim(1), d = a.dim(2), M = b.dim(1);
    expect(b.dim(0) == N && b.dim(2) == d, "matmul_nt",
           shape_string(a.shape()) + " x " + shape_string(b.shape()) + "^T");
    Tensor y({N, L, M});
    for (int n = 0; n < N; ++n)
        for (int i = 0; i < L; ++i) {
            const double* ar = a.ptr() + (std::size_t(n) * L + i) * d;
            for (int j = 0; j < M; ++j) {
                const double* br = b.ptr() + (std::size_t(n) * M + j) * d;
                double s = 0.0;
                for (int k = 0; k < d; ++k)
                    s += ar[k] * br[k];
                y[(std::size_t(n) * L + i) * M + j] = s;
            }
        }
    const Id out = push(std::move(y), {ai, bi});
    node(out).backward = [this, out, ai, bi, N, L, d, M] {
        const Tensor& g = node(out).grad;
        const Tensor& a = value(ai);
        const Tensor& b = value(bi);
        Tensor* ga = requires_grad(ai) ? &grad_ref(ai) : nullptr;
        Tensor* gb = requires_grad(bi) ? &grad_ref(bi) : nullptr;
        for (int n = 0; n < N; ++n)
            for (int i = 0; i < L; ++i)
                for (int j = 0; j < M; ++j) {
                    const double gv = g[(std::size_t(n) * L + i) * M + j];
                    const std::size_t ao = (std::size_t(n) * L + i) * d;
                    const std::size_t bo = (std::size_t(n) * M + j) * d;
                    if (ga)
                        for (int k = 0; k < d; ++k)
                            (*ga)[ao + k] += gv * b[bo + k];
                    if (gb)
                        for (int k = 0; k < d; ++k)
                            (*gb)[bo + k] += gv * a[ao + k];
                }
    };
    return out;
}

Tape::Id
Tape::matmul(Id ai, Id bi)
{
    const Tensor& a = value(ai);
    const Tensor& b = value(bi);
    expect_rank(a, 3, "matmul");
    expect_rank(b, 3, "matmul");
    const int N = a.dim(0), L = a.dim(1), M = a.dim(2), d = b.dim(2);
    expect(b.dim(0) == N && b.dim(1) == M, "matmul",
           shape_string(a.shape()) + " x " + shape_string(b.shape()));
    Tensor y({N, L, d});
    for (int n = 0; n < N; ++n)
        for (int i = 0; i < L; ++i) {
            double* yr = y.ptr() + (std::size_t(n) * L + i) * d;
            for (int j = 0; j < M; ++j) {
                const double av = a[(std::size_t(n) * L + i) * M + j];
                const double* br = b.ptr() + (std::size_t(n) * M + j) * d;
                for (int k = 0; k < d; ++k)
                    yr[k] += av * br[k];
            }
        }
    const Id out = push(std::move(y), {ai, bi});
    node(out).backward = [this, out, ai, bi, N, L, M, d] {
        const Tensor& g = node(out).grad;
        const Tensor& a = value(ai);
        const Tensor& b = value(bi);
        Tensor* ga = requires_grad(ai) ? &grad_ref(ai) : nullptr;
        Tensor* gb = requires_grad(bi) ? &grad_ref(bi) : nullptr;
        for (int n = 0; n < N; ++n)
            for (int i = 0; i < L; ++i) {
                const double* gr = g.ptr() + (std::size_t(n) * L + i) * d;
                for (int j = 0; j < M; ++j) {
                    const std::size_t ai_off = (std::size_t(n) * L + i) * M + j;
                    const std::size_t bo = (std::size_t(n) * M + j) * d;
                    if (ga) {
                        double s = 0.0;
                        for (int k = 0; k < d; ++k)
                            s += gr[k] * b[bo + k];
                        (*ga)[ai_off] += s;
                    }
                    if (gb) {
                        const double av = a[ai_off];
                        for (int k = 0; k < d; ++k)
                            (*gb)[bo + k] += av * gr[k];
                    }
                }
            }
    };
    return out;
}

Tape::Id
Tape::softmax(Id xi)
{
    const Tensor& x = value(xi);
    expect(x.rank() >= 1, "softmax", "scalar input");
    const int K = x.dim(x.rank() - 1);
    expect(K > 0, "softmax", "empty last axis");
    const std::size_t rows = x.size() / std::size_t(K);
    Tensor y(x.shape());
    for (std::size_t r = 0; r < rows; ++r) {
        const double* xr = x.ptr() + r * K;
        double* yr = y.ptr() + r * K;
        const double m = *std::max_element(xr, xr + K);
        double s = 0.0;
        for (int k = 0; k < K; ++k) {
            yr[k] = std::exp(xr[k] - m);
            s += yr[k];
        }
        const double inv = 1.0 / s;
        for (int k = 0; k < K; ++k)
            yr[k] *= inv;
    }
    const Id out = push(std::move(y), {xi});
    node(out).backward = [this, out, xi, rows, K] {
        const Tensor& g = node(out).grad;
        const Tensor& y = value(out);
        Tensor& gx = grad_ref(xi);
        for (std::size_t r = 0; r < rows; ++r) {
            const double* yr = y.ptr() + r * K;
            const double* gr = g.ptr() + r * K;
            double dotp = 0.0;
            for (int k = 0; k < K; ++k)
                dotp += gr[k] * yr[k];
            for (int k = 0; k < K; ++k)
                gx[r * K + k] += yr[k] * (gr[k] - dotp);
        }
    };
    return out;
}

Tape::Id
Tape::scale(Id xi, double k)
{
    const Tensor& x = value(xi);
    Tensor y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = k * x[i];
    const Id out = push(std::move(y), {xi});
    node(out).backward = [this, out, xi, k] {
        const Tensor& g = node(out).grad;
        Tensor& gx = grad_ref(xi);
        for (std::size_t i = 0; i < g.size(); ++i)
            gx[i] += k * g[i];
    };
    return out;
}

Tape::Id
Tape::add(Id ai, Id bi)
{
    const Tensor& a = value(ai);
    const Tensor& b = value(bi);
    expect(a.shape() == b.shape(), "add",
           shape_string(a.shape()) + " + " + shape_string(b.shape()));
    Tensor y(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i)
        y[i] = a[i] + b[i];
    const Id out = push(std::move(y), {ai, bi});
    node(out).backward = [this, out, ai, bi] {
        const Tensor& g = node(out).grad;
        for (Id id : {ai, bi}) {
            if (!requires_grad(id))
                continue;
            Tensor& gx = grad_ref(id);
            for (std::size_t i = 0; i < g.size(); ++i)
                gx[i] += g[i];
        }
    };
    return out;
}

Tape::Id
Tape::linear(Id xi, Id wi, Id bi)
{
    const Tensor& x = value(xi);
    const Tensor& w = value(wi);
    const Tensor& b = value(bi);
    expect_rank(x, 2, "linear");
    expect_rank(w, 2, "linear");
    expect_rank(b, 1, "linear");
    const int N = x.dim(0), F = x.dim(1), O = w.dim(0);
    expect(w.dim(1) == F && b.dim(0) == O, "linear",
           "weight " + shape_string(w.shape()) + " does not fit input "
               + shape_string(x.shape()));
    Tensor y({N, O});
    for (int n = 0; n < N; ++n)
        for (int o = 0; o < O; ++o) {
            double s = b[std::size_t(o)];
            for (int f = 0; f < F; ++f)
                s += w[std::size_t(o) * F + f] * x[std::size_t(n) * F + f];
            y[std::size_t(n) * O + o] = s;
        }
    const Id out = push(std::move(y), {xi, wi, bi});
    node(out).backward = [this, out, xi, wi, bi, N, F, O] {
        const Tensor& g = node(out).grad;
        const Tensor& x = value(xi);
        const Tensor& w = value(wi);
        Tensor* gx = requires_grad(xi) ? &grad_ref(xi) : nullptr;
        Tensor* gw = requires_grad(wi) ? &grad_ref(wi) : nullptr;
        Tensor* gb = requires_grad(bi) ? &grad_ref(bi) : nullptr;
        for (int n = 0; n < N; ++n)
            for (int o = 0; o < O; ++o) {
                const double gv = g[std::size_t(n) * O + o];
                if (gb)
                    (*gb)[std::size_t(o)] += gv;
                for (int f = 0; f < F; ++f) {
                    if (gw)
                        (*gw)[std::size_t(o) * F + f]
                            += gv * x[std::size_t(n) * F + f];
                    if (gx)
                        (*gx)[std::size_t(n) * F + f]
                            += gv * w[std::size_t(o) * F + f];
                }
            }
    };
    return out;
}

Tape::Id
Tape::token_linear(Id xi, Id wi)
{
    const Tensor& x = value(xi);
    const Tensor& w = value(wi);
    expect_rank(x, 3, "token_linear");
    expect_rank(w, 2, "token_linear");
    const int rows = x.dim(0) * x.dim(1), d = x.dim(2), e = w.dim(0);
    expect(w.dim(1) == d, "token_linear",
           "weight " + shape_string(w.shape()) + " does not fit input "
               + shape_string(x.shape()));
    Tensor y({x.dim(0), x.dim(1), e});
    for (int r = 0; r < rows; ++r)
        for (int o = 0; o < e; ++o) {
            double s = 0.0;
            for (int k = 0; k < d; ++k)
                s += w[std::size_t(o) * d + k] * x[std::size_t(r) * d + k];
            y[std::size_t(r) * e + o] = s;
        }
    const Id out = push(std::move(y), {xi, wi});
    node(out).backward = [this, out, xi, wi, rows, d, e] {
        const Tensor& g = node(out).grad;
        const Tensor& x = value(xi);
        const Tensor& w = value(wi);
        Tensor* gx = requires_grad(xi) ? &grad_ref(xi) : nullptr;
        Tensor* gw = requires_grad(wi) ? &grad_ref(wi) : nullptr;
        for (int r = 0; r < rows; ++r)
            for (int o = 0; o < e; ++o) {
                const double gv = g[std::size_t(r) * e + o];
                for (int k = 0; k < d; ++k) {
                    if (gw)
                        (*gw)[std::size_t(o) * d + k]
                            += gv * x[std::size_t(r) * d + k];
                    if (gx)
                        (*gx)[std::size_t(r) * d + k]
                            += gv * w[std::size_t(o) * d + k];
                }
            }
    };
    return out;
}

Tape::Id
Tape::concat(const std::vector<Id>& parts)
{
    expect(!parts.empty(), "concat", "no inputs");
    const int N = value(parts[0]).dim(0);
    int F = 0;
    std::vector<int> widths;
    for (Id p : parts) {
        const Tensor& t = value(p);
        expect_rank(t, 2, "concat");
        expect(t.dim(0) == N, "concat", "batch sizes differ");
        widths.push_back(t.dim(1));
        F += t.dim(1);
    }
    Tensor y({N, F});
    int offset = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const Tensor& t = value(parts[i]);
        for (int n = 0; n < N; ++n)
            for (int f = 0; f < widths[i]; ++f)
                y[std::size_t(n) * F + offset + f]
                    = t[std::size_t(n) * widths[i] + f];
        offset += widths[i];
    }
    const Id out = push(std::move(y), parts);
    node(out).backward = [this, out, parts, widths, N, F] {
        const Tensor& g = node(out).grad;
        int offset = 0;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (requires_grad(parts[i])) {
                Tensor& gx = grad_ref(parts[i]);
                for (int n = 0; n < N; ++n)
                    for (int f = 0; f < widths[i]; ++f)
                        gx[std::size_t(n) * widths[i] + f]
                            += g[std::size_t(n) * F + offset + f];
            }
            offset += widths[i];
        }
    };
    return out;
}

Tape::Id
Tape::mean_tokens(Id xi)
{
    const Tensor& x = value(xi);
    expect_rank(x, 3, "mean_tokens");
    const int N = x.dim(0), L = x.dim(1), d = x.dim(2);
    expect(L > 0, "mean_tokens", "no tokens");
    const double k = 1.0 / L;
    Tensor y({N, d});
    for (int n = 0; n < N; ++n)
        for (int l = 0; l < L; ++l)
            for (int j = 0; j < d; ++j)
                y[std::size_t(n) * d + j] += x[(std::size_t(n) * L + l) * d + j];
    for (double& v : y.data())
        v *= k;
    const Id out = push(std::move(y), {xi});
    node(out).backward = [this, out, xi, N, L, d, k] {
        const Tensor& g = node(out).grad;
        Tensor& gx = grad_ref(xi);
        for (int n = 0; n < N; ++n)
            for (int l = 0; l < L; ++l)
                for (int j = 0; j < d; ++j)
                    gx[(std::size_t(n) * L + l) * d + j]
                        += g[std::size_t(n) * d + j] * k;
    };
    return out;
}

Tape::Id
Tape::softmax_cross_entropy(Id li, const std::vector<int>& labels)
{
    const Tensor& z = value(li);
    expect_rank(z, 2, "softmax_cross_entropy");
    const int N = z.dim(0), K = z.dim(1);
    expect(int(labels.size()) == N && N > 0, "softmax_cross_entropy",
           "label count differs from batch size");
    Tensor prob({N, K});
    double loss = 0.0;
    for (int n = 0; n < N; ++n) {
        expect(labels[n] >= 0 && labels[n] < K, "softmax_cross_entropy",
               "label out of range");
        const double* zr = z.ptr() + std::size_t(n) * K;
        const double m = *std::max_element(zr, zr + K);
        double s = 0.0;
        for (int k = 0; k < K; ++k)
            s += std::exp(zr[k] - m);
        const double lse = m + std::log(s);
        for (int k = 0; k < K; ++k)
            prob[std::size_t(n) * K + k] = std::exp(zr[k] - lse);
        loss += lse - zr[labels[n]];
    }
    const Id out = push(Tensor({1}, loss / N), {li});
    node(out).backward = [this, out, li, labels, prob, N, K] {
        const double g = node(out).grad[0] / N;
        Tensor& gz = grad_ref(li);
        for (int n = 0; n < N; ++n)
            for (int k = 0; k < K; ++k)
                gz[std::size_t(n) * K + k]
                    += g * (prob[std::size_t(n) * K + k]
                            - (k == labels[n] ? 1.0 : 0.0));
    };
    return out;
}

Tape::Id
Tape::weighted_sum(Id xi, const Tensor& weights)
{
    const Tensor& x = value(xi);
    expect(x.shape() == weights.shape(), "weighted_sum", "shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += x[i] * weights[i];
    const Id out = push(Tensor({1}, s), {xi});
    node(out).backward = [this, out, xi, weights] {
        const double g = node(out).grad[0];
        Tensor& gx = grad_ref(xi);
        for (std::size_t i = 0; i < gx.size(); ++i)
            gx[i] += g * weights[i];
    };
    return out;
}

Tape::Id
cross_attention(Tape& tape, Tape::Id q, Tape::Id kv,
                const std::vector<Tape::Id>& residuals)
{
    const Tensor& qv = tape.value(q);
    const Tensor& kvv = tape.value(kv);
    expect_rank(qv, 3, "cross_attention");
    expect_rank(kvv, 3, "cross_attention");
    const int d = qv.dim(2);
    expect(d > 0 && qv.dim(1) > 0 && kvv.dim(1) > 0, "cross_attention",
           "empty token set or feature width");
    expect(kvv.dim(2) == d, "cross_attention", "feature widths differ");
    const Tape::Id scores = tape.scale(tape.matmul_nt(q, kv),
                                       1.0 / std::sqrt(double(d)));
    Tape::Id out = tape.matmul(tape.softmax(scores), kv);
    for (Tape::Id r : residuals)
        out = tape.add(out, r);
    return out;
}

}  // namespace specsep
