// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "specsep/error.hpp"
#include "specsep/internal/sh_solver.hpp"
#include "specsep/random.hpp"
#include "specsep/sh.hpp"

namespace specsep {

PCATextureBasis
make_synthetic_pca_basis(int resolution, int rank, std::uint64_t seed)
{
    require(resolution > 0, "basis resolution must be positive");
    const std::size_t dim = std::size_t(resolution) * resolution * 3;
    require(rank >= 0 && std::size_t(rank) <= dim, "invalid basis rank");

    PCATextureBasis basis;
    basis.resolution = resolution;
    basis.mean = Raster(resolution, resolution, 3);
    constexpr double tint[3] = {0.72, 0.55, 0.46};
    for (int y = 0; y < resolution; ++y) {
        const double v = (y + 0.5) / resolution;
        for (int x = 0; x < resolution; ++x) {
            const double u = (x + 0.5) / resolution;
            const double shade = 0.9 + 0.1 * std::cos(2.0 * std::numbers::pi * u)
                                           * std::sin(std::numbers::pi * v);
            for (int c = 0; c < 3; ++c)
                basis.mean.at(x, y, c) = tint[c] * shade;
        }
    }
    if (rank == 0)
        return basis;

    Rng rng(seed);
    Eigen::MatrixXd g(Eigen::Index(dim), rank);
    for (int k = 0; k < rank; ++k)
        for (std::size_t i = 0; i < dim; ++i)
            g(Eigen::Index(i), k) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    const Eigen::MatrixXd q = qr.householderQ()
                              * Eigen::MatrixXd::Identity(Eigen::Index(dim),
                                                          rank);
    basis.axes.assign(std::size_t(rank), std::vector<double>(dim));
    for (int k = 0; k < rank; ++k)
        for (std::size_t i = 0; i < dim; ++i)
            basis.axes[k][i] = q(Eigen::Index(i), k);
    return basis;
}

namespace {

std::vector<std::size_t>
texel_of_pixels(const GeometryBuffers& buffers,
                const std::vector<std::size_t>& pixels, int res)
{
    std::vector<std::size_t> texel(pixels.size());
    for (std::size_t r = 0; r < pixels.size(); ++r) {
        const Vec2 t = buffers.uv[pixels[r]];
        texel[r] = std::size_t(uv_to_texel(t.y, res)) * res
                   + uv_to_texel(t.x, res);
    }
    return texel;
}

void
fill_texture(Raster& texture, const PCATextureBasis& basis,
             const std::vector<double>& beta,
             const std::vector<std::size_t>& pixels,
             const std::vector<std::size_t>& texel)
{
    const std::size_t plane = std::size_t(basis.resolution) * basis.resolution;
    for (int c = 0; c < 3; ++c) {
        const auto mean = basis.mean.plane(c);
        auto out = texture.plane(c);
        for (std::size_t r = 0; r < pixels.size(); ++r) {
            const std::size_t i = c * plane + texel[r];
            double t = mean[texel[r]];
            for (std::size_t k = 0; k < beta.size(); ++k)
                t += beta[k] * basis.axes[k][i];
            out[pixels[r]] = t;
        }
    }
}

}  // namespace

Raster
pca_texture(const PCATextureBasis& basis, const std::vector<double>& beta,
            const GeometryBuffers& buffers)
{
    require(beta.size() == basis.axes.size(), "beta length differs from rank");
    std::vector<std::size_t> pixels;
    for (std::size_t p = 0; p < buffers.pixel_count(); ++p)
        if (buffers.mask[p])
            pixels.push_back(p);
    Raster out(buffers.width, buffers.height, 3, 0.0);
    fill_texture(out, basis, beta, pixels,
                 texel_of_pixels(buffers, pixels, basis.resolution));
    return out;
}

PCAFitResult
fit_pca_texture_baseline(const Raster& image, const GeometryBuffers& buffers,
                         const PCATextureBasis& basis, int max_iters,
                         double tol)
{
    const auto start = std::chrono::steady_clock::now();
    require(image.channels() == 3, "PCA baseline needs an RGB image");
    require(image.width() == buffers.width && image.height() == buffers.height,
            "image and geometry buffers differ in size");
    require(basis.mean.width() == basis.resolution
                && basis.mean.height() == basis.resolution
                && basis.mean.channels() == 3,
            "basis mean does not match its resolution");
    require(max_iters >= 1, "max_iters must be at least 1");

    const detail::MaskedBasis sh = detail::masked_basis(buffers);
    const std::size_t n = sh.pixel.size();
    if (n < std::size_t(kShCount))
        fail(ErrorKind::Fit, "need at least 9 masked pixels, got "
                                 + std::to_string(n));
    const std::vector<std::size_t> texel
        = texel_of_pixels(buffers, sh.pixel, basis.resolution);
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t(0));

    const int rank = basis.rank();
    const std::size_t plane = std::size_t(basis.resolution) * basis.resolution;

    PCAFitResult result;
    result.beta.assign(std::size_t(rank), 0.0);
    Raster texture(image.width(), image.height(), 3, 0.0);
    std::vector<double> shading(n * 3);
    Eigen::MatrixXd ata(rank, rank);
    Eigen::VectorXd atb(rank);
    std::vector<double> a(static_cast<std::size_t>(rank));

    // Residual increases below this level are round-off, not divergence.
    double image_sq = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t r = 0; r < n; ++r)
            image_sq += image.plane(c)[sh.pixel[r]] * image.plane(c)[sh.pixel[r]];
    const double roundoff = 1e-10 * std::sqrt(image_sq / double(3 * n));

    double previous = 0.0;
    int increases = 0;
    for (int iter = 0; iter < max_iters; ++iter) {
        // gamma with the texture fixed
        fill_texture(texture, basis, result.beta, sh.pixel, texel);
        for (int c = 0; c < 3; ++c) {
            const auto tex = texture.plane(c);
            for (std::size_t r = 0; r < n; ++r)
                if (!(tex[sh.pixel[r]] > 0.0))
                    fail(ErrorKind::Fit, "PCA texture is not positive at pixel "
                                             + std::to_string(sh.pixel[r]));
            const auto g = detail::fit_channel(sh, image.plane(c), tex, rows);
            for (int k = 0; k < kShCount; ++k)
                result.gamma.gamma[k][c] = g[k];
        }
        for (std::size_t r = 0; r < n; ++r)
            for (int c = 0; c < 3; ++c)
                shading[r * 3 + c] = result.gamma.shading(sh.h[r], c);

        // beta with the shading fixed
        if (rank > 0) {
            ata.setZero();
            atb.setZero();
            for (int c = 0; c < 3; ++c) {
                const auto img = image.plane(c);
                const auto mean = basis.mean.plane(c);
                for (std::size_t r = 0; r < n; ++r) {
                    const double s = shading[r * 3 + c];
                    const std::size_t i = c * plane + texel[r];
                    for (int k = 0; k < rank; ++k)
                        a[k] = s * basis.axes[k][i];
                    const double y = img[sh.pixel[r]] - s * mean[texel[r]];
                    for (int k = 0; k < rank; ++k) {
                        atb(k) += a[k] * y;
                        for (int j = k; j < rank; ++j)
                            ata(k, j) += a[k] * a[j];
                    }
                }
            }
            for (int k = 0; k < rank; ++k)
                for (int j = 0; j < k; ++j)
                    ata(k, j) = ata(j, k);
            const Eigen::VectorXd beta = ata.ldlt().solve(atb);
            for (int k = 0; k < rank; ++k)
                result.beta[k] = beta(k);
            fill_texture(texture, basis, result.beta, sh.pixel, texel);
        }

        double sq = 0.0;
        for (int c = 0; c < 3; ++c) {
            const auto img = image.plane(c);
            const auto tex = texture.plane(c);
            for (std::size_t r = 0; r < n; ++r) {
                const std::size_t p = sh.pixel[r];
                const double e = img[p] - shading[r * 3 + c] * tex[p];
                sq += e * e;
            }
        }
        const double rms = std::sqrt(sq / double(3 * n));
        if (!std::isfinite(rms))
            fail(ErrorKind::Fit, "PCA baseline residual is not finite");
        result.residual_history.push_back(rms);
        result.iterations = iter + 1;

        if (iter > 0) {
            if (rms > previous * (1.0 + 1e-12) + roundoff) {
                if (++increases >= 3)
                    fail(ErrorKind::Fit, "PCA baseline diverged after "
                                             + std::to_string(iter + 1)
                                             + " iterations");
            } else {
                increases = 0;
            }
            if (tol > 0.0
                && std::abs(previous - rms) <= tol * std::max(previous, 1e-300))
                break;
        }
        previous = rms;
    }
    result.wall_time_s = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    return result;
}

}  // namespace specsep
