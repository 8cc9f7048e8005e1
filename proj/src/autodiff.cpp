// SPDX-License-Identifier: Apache-2.0
//
// sitebeam: site-specific probing codebooks and generative beam refinement
// Copyright (C) 2026 The sitebeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "sitebeam/autodiff.hpp"
#include "sitebeam/errors.hpp"
#include "sitebeam/linalg.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace sitebeam
{
    Var Tape::variable(Tensor value)
    {
        nodes_.push_back(Node{std::move(value), {}, true});
        return Var(this, nodes_.size() - 1);
    }

    Var Tape::constant(Tensor value)
    {
        nodes_.push_back(Node{std::move(value), {}, false});
        return Var(this, nodes_.size() - 1);
    }

    Var Tape::record(Tensor value, std::initializer_list<Var> parents, Backward backward)
    {
        bool needs = false;
        for (const Var &p : parents)
        {
            if (!owns(p))
                throw std::invalid_argument("operand belongs to a different tape");
            needs = needs || nodes_[p.id()].requires_grad;
        }
        nodes_.push_back(Node{std::move(value), needs ? std::move(backward) : Backward{}, needs});
        return Var(this, nodes_.size() - 1);
    }

    void Tape::truncate(std::size_t n)
    {
        if (n < nodes_.size())
            nodes_.resize(n);
    }

    void Tape::accumulate(Var target, const Tensor &g)
    {
        const std::size_t id = target.id();
        if (!nodes_[id].requires_grad)
            return;
        if (has_grad_[id])
            grads_[id] += g;
        else
        {
            grads_[id] = g;
            has_grad_[id] = 1;
        }
    }

    void Tape::accumulate(Var target, Tensor &&g)
    {
        const std::size_t id = target.id();
        if (!nodes_[id].requires_grad)
            return;
        if (has_grad_[id])
            grads_[id] += g;
        else
        {
            grads_[id] = std::move(g);
            has_grad_[id] = 1;
        }
    }

    std::vector<Tensor> Tape::gradients(Var output, std::span<const Var> leaves)
    {
        if (!owns(output))
            throw std::invalid_argument("gradients: output is not on this tape");
        if (nodes_[output.id()].value.size() != 1)
            throw ShapeError("gradients: output must be a scalar, got shape " +
                             shape_string(nodes_[output.id()].value.shape()));
        for (const Var &leaf : leaves)
            if (!owns(leaf))
                throw std::invalid_argument("gradients: requested leaf is not on this tape");

        grads_.assign(nodes_.size(), Tensor());
        has_grad_.assign(nodes_.size(), 0);
        grads_[output.id()] = Tensor(nodes_[output.id()].value.shape(), 1.0);
        has_grad_[output.id()] = 1;

        for (std::size_t i = output.id() + 1; i-- > 0;)
        {
            if (!has_grad_[i] || !nodes_[i].backward)
                continue;
            nodes_[i].backward(*this, grads_[i]);
        }

        std::vector<Tensor> out;
        out.reserve(leaves.size());
        for (const Var &leaf : leaves)
        {
            if (has_grad_[leaf.id()])
                out.push_back(grads_[leaf.id()]);
            else
                out.emplace_back(nodes_[leaf.id()].value.shape(), 0.0);
        }
        grads_.clear();
        has_grad_.clear();
        return out;
    }

    namespace ad
    {
        namespace
        {
            using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
            using ConstMap = Eigen::Map<const RowMatrix>;
            using MutMap = Eigen::Map<RowMatrix>;

            enum class Broadcast
            {
                same,
                row,
                scalar
            };

            Broadcast broadcast_kind(const Tensor &a, const Tensor &b, const char *op)
            {
                if (a.shape() == b.shape())
                    return Broadcast::same;
                if (b.size() == 1 && b.rank() <= 1)
                    return Broadcast::scalar;
                if (a.rank() == 2 && b.rank() == 1 && b.size() == a.cols())
                    return Broadcast::row;
                throw ShapeError(std::string(op) + ": shapes " + shape_string(a.shape()) + " and " +
                                 shape_string(b.shape()) + " do not conform");
            }

            inline std::size_t b_index(Broadcast kind, std::size_t i, std::size_t cols)
            {
                switch (kind)
                {
                case Broadcast::same:
                    return i;
                case Broadcast::row:
                    return i % cols;
                default:
                    return 0;
                }
            }

            // f(x, y), df/dx, df/dy evaluated elementwise with broadcasting of y.
            template <class F, class DX, class DY>
            Var binary(Var a, Var b, const char *name, F f, DX dfx, DY dfy)
            {
                Tape &tape = *a.tape();
                const Tensor &av = a.value();
                const Tensor &bv = b.value();
                const Broadcast kind = broadcast_kind(av, bv, name);
                const std::size_t cols = av.cols();
                Tensor out(av.shape());
                for (std::size_t i = 0; i < av.size(); ++i)
                    out[i] = f(av[i], bv[b_index(kind, i, cols)]);
                return tape.record(std::move(out), {a, b}, [a, b, kind, cols, dfx, dfy](Tape &t, const Tensor &g) {
                    const Tensor &x = t.value(a);
                    const Tensor &y = t.value(b);
                    if (t.requires_grad(a))
                    {
                        Tensor ga(x.shape());
                        for (std::size_t i = 0; i < x.size(); ++i)
                            ga[i] = g[i] * dfx(x[i], y[b_index(kind, i, cols)]);
                        t.accumulate(a, std::move(ga));
                    }
                    if (t.requires_grad(b))
                    {
                        Tensor gb(y.shape());
                        for (std::size_t i = 0; i < x.size(); ++i)
                        {
                            const std::size_t j = b_index(kind, i, cols);
                            gb[j] += g[i] * dfy(x[i], y[j]);
                        }
                        t.accumulate(b, std::move(gb));
                    }
                });
            }

            // y = f(x), dy/dx = df(x).
            template <class F, class DF>
            Var unary(Var x, F f, DF df)
            {
                Tape &tape = *x.tape();
                const Tensor &xv = x.value();
                Tensor out(xv.shape());
                for (std::size_t i = 0; i < xv.size(); ++i)
                    out[i] = f(xv[i]);
                return tape.record(std::move(out), {x}, [x, df](Tape &t, const Tensor &g) {
                    const Tensor &xv = t.value(x);
                    Tensor gx(xv.shape());
                    for (std::size_t i = 0; i < xv.size(); ++i)
                        gx[i] = g[i] * df(xv[i]);
                    t.accumulate(x, std::move(gx));
                });
            }

            void require_matrix(const Tensor &t, const char *name)
            {
                if (t.rank() != 2)
                    throw ShapeError(std::string(name) + ": expected a matrix, got " + shape_string(t.shape()));
            }

            double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }
        }

        Var add(Var a, Var b)
        {
            return binary(
                a, b, "add", [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
                [](double, double) { return 1.0; });
        }

        Var sub(Var a, Var b)
        {
            return binary(
                a, b, "sub", [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
                [](double, double) { return -1.0; });
        }

        Var mul(Var a, Var b)
        {
            return binary(
                a, b, "mul", [](double x, double y) { return x * y; }, [](double, double y) { return y; },
                [](double x, double) { return x; });
        }

        Var div(Var a, Var b)
        {
            return binary(
                a, b, "div", [](double x, double y) { return x / y; }, [](double, double y) { return 1.0 / y; },
                [](double x, double y) { return -x / (y * y); });
        }

        Var neg(Var x) { return scale(x, -1.0); }

        Var scale(Var x, double factor)
        {
            return unary(x, [factor](double v) { return factor * v; }, [factor](double) { return factor; });
        }

        Var shift(Var x, double offset)
        {
            return unary(x, [offset](double v) { return v + offset; }, [](double) { return 1.0; });
        }

        Var exp(Var x)
        {
            return unary(x, [](double v) { return std::exp(v); }, [](double v) { return std::exp(v); });
        }

        Var log(Var x)
        {
            return unary(x, [](double v) { return std::log(v); }, [](double v) { return 1.0 / v; });
        }

        Var square(Var x)
        {
            return unary(x, [](double v) { return v * v; }, [](double v) { return 2.0 * v; });
        }

        Var sqrt(Var x)
        {
            return unary(x, [](double v) { return std::sqrt(v); }, [](double v) { return 0.5 / std::sqrt(v); });
        }

        Var sin(Var x)
        {
            return unary(x, [](double v) { return std::sin(v); }, [](double v) { return std::cos(v); });
        }

        Var cos(Var x)
        {
            return unary(x, [](double v) { return std::cos(v); }, [](double v) { return -std::sin(v); });
        }

        Var silu(Var x)
        {
            return unary(
                x, [](double v) { return v * sigmoid(v); },
                [](double v) {
                    const double s = sigmoid(v);
                    return s * (1.0 + v * (1.0 - s));
                });
        }

        Var clamp_min(Var x, double floor)
        {
            return unary(
                x, [floor](double v) { return v < floor ? floor : v; },
                [floor](double v) { return v < floor ? 0.0 : 1.0; });
        }

        Var sum(Var x)
        {
            const Tensor &xv = x.value();
            double acc = 0.0;
            for (double v : xv.data())
                acc += v;
            return x.tape()->record(Tensor::scalar(acc), {x}, [x](Tape &t, const Tensor &g) {
                t.accumulate(x, Tensor(t.value(x).shape(), g[0]));
            });
        }

        Var mean(Var x) { return scale(sum(x), 1.0 / static_cast<double>(x.value().size())); }

        Var sum_rows(Var x)
        {
            const Tensor &xv = x.value();
            require_matrix(xv, "sum_rows");
            const std::size_t n = xv.rows(), d = xv.cols();
            Tensor out(Shape{d});
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    out[j] += xv(i, j);
            return x.tape()->record(std::move(out), {x}, [x, n, d](Tape &t, const Tensor &g) {
                Tensor gx(Shape{n, d});
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < d; ++j)
                        gx(i, j) = g[j];
                t.accumulate(x, std::move(gx));
            });
        }

        Var mean_rows(Var x) { return scale(sum_rows(x), 1.0 / static_cast<double>(x.value().rows())); }

        Var matmul(Var a, Var b)
        {
            Tensor out = linalg::matmul(a.value(), b.value());
            return a.tape()->record(std::move(out), {a, b}, [a, b](Tape &t, const Tensor &g) {
                const Tensor &av = t.value(a);
                const Tensor &bv = t.value(b);
                const ConstMap gm(g.data().data(), g.rows(), g.cols());
                if (t.requires_grad(a))
                {
                    Tensor ga(av.shape());
                    MutMap(ga.data().data(), av.rows(), av.cols()).noalias() =
                        gm * ConstMap(bv.data().data(), bv.rows(), bv.cols()).transpose();
                    t.accumulate(a, std::move(ga));
                }
                if (t.requires_grad(b))
                {
                    Tensor gb(bv.shape());
                    MutMap(gb.data().data(), bv.rows(), bv.cols()).noalias() =
                        ConstMap(av.data().data(), av.rows(), av.cols()).transpose() * gm;
                    t.accumulate(b, std::move(gb));
                }
            });
        }

        Var transpose(Var x)
        {
            require_matrix(x.value(), "transpose");
            return x.tape()->record(linalg::transpose(x.value()), {x},
                                    [x](Tape &t, const Tensor &g) { t.accumulate(x, linalg::transpose(g)); });
        }

        Var concat_cols(Var a, Var b)
        {
            const Tensor &av = a.value();
            const Tensor &bv = b.value();
            require_matrix(av, "concat_cols");
            require_matrix(bv, "concat_cols");
            if (av.rows() != bv.rows())
                throw ShapeError("concat_cols: row counts " + std::to_string(av.rows()) + " and " +
                                 std::to_string(bv.rows()));
            const std::size_t n = av.rows(), da = av.cols(), db = bv.cols();
            Tensor out(Shape{n, da + db});
            for (std::size_t i = 0; i < n; ++i)
            {
                for (std::size_t j = 0; j < da; ++j)
                    out(i, j) = av(i, j);
                for (std::size_t j = 0; j < db; ++j)
                    out(i, da + j) = bv(i, j);
            }
            return a.tape()->record(std::move(out), {a, b}, [a, b, n, da, db](Tape &t, const Tensor &g) {
                if (t.requires_grad(a))
                {
                    Tensor ga(Shape{n, da});
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < da; ++j)
                            ga(i, j) = g(i, j);
                    t.accumulate(a, std::move(ga));
                }
                if (t.requires_grad(b))
                {
                    Tensor gb(Shape{n, db});
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < db; ++j)
                            gb(i, j) = g(i, da + j);
                    t.accumulate(b, std::move(gb));
                }
            });
        }

        Var layer_norm(Var x, double eps)
        {
            const Tensor &xv = x.value();
            require_matrix(xv, "layer_norm");
            const std::size_t n = xv.rows(), d = xv.cols();
            Tensor out(xv.shape());
            auto inv_std = std::make_shared<std::vector<double>>(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                double mu = 0.0;
                for (std::size_t j = 0; j < d; ++j)
                    mu += xv(i, j);
                mu /= static_cast<double>(d);
                double var = 0.0;
                for (std::size_t j = 0; j < d; ++j)
                {
                    const double c = xv(i, j) - mu;
                    var += c * c;
                }
                var /= static_cast<double>(d);
                const double is = 1.0 / std::sqrt(var + eps);
                (*inv_std)[i] = is;
                for (std::size_t j = 0; j < d; ++j)
                    out(i, j) = (xv(i, j) - mu) * is;
            }
            return x.tape()->record(std::move(out), {x}, [x, inv_std, n, d](Tape &t, const Tensor &g) {
                Tensor gx(Shape{n, d});
                const Tensor &xv = t.value(x);
                for (std::size_t i = 0; i < n; ++i)
                {
                    const double is = (*inv_std)[i];
                    double mu = 0.0;
                    for (std::size_t j = 0; j < d; ++j)
                        mu += xv(i, j);
                    mu /= static_cast<double>(d);
                    double mean_g = 0.0, mean_gx = 0.0;
                    for (std::size_t j = 0; j < d; ++j)
                    {
                        const double xh = (xv(i, j) - mu) * is;
                        mean_g += g(i, j);
                        mean_gx += g(i, j) * xh;
                    }
                    mean_g /= static_cast<double>(d);
                    mean_gx /= static_cast<double>(d);
                    for (std::size_t j = 0; j < d; ++j)
                    {
                        const double xh = (xv(i, j) - mu) * is;
                        gx(i, j) = is * (g(i, j) - mean_g - xh * mean_gx);
                    }
                }
                t.accumulate(x, std::move(gx));
            });
        }

        Var logsumexp(Var x)
        {
            const Tensor &xv = x.value();
            require_matrix(xv, "logsumexp");
            const std::size_t n = xv.rows(), k = xv.cols();
            Tensor out(Shape{n});
            for (std::size_t i = 0; i < n; ++i)
            {
                double m = -std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < k; ++j)
                    m = std::max(m, xv(i, j));
                double s = 0.0;
                for (std::size_t j = 0; j < k; ++j)
                    s += std::exp(xv(i, j) - m);
                out[i] = m + std::log(s);
            }
            Tape &tape = *x.tape();
            auto lse = std::make_shared<Tensor>(out);
            return tape.record(std::move(out), {x}, [x, lse, n, k](Tape &t, const Tensor &g) {
                const Tensor &xv = t.value(x);
                Tensor gx(Shape{n, k});
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < k; ++j)
                        gx(i, j) = g[i] * std::exp(xv(i, j) - (*lse)[i]);
                t.accumulate(x, std::move(gx));
            });
        }

        Var logdet(Var a)
        {
            auto lower = std::make_shared<Tensor>(linalg::cholesky(a.value()));
            const double value = linalg::logdet_from_cholesky(*lower);
            return a.tape()->record(Tensor::scalar(value), {a}, [a, lower](Tape &t, const Tensor &g) {
                Tensor inv = linalg::inverse_from_cholesky(*lower);
                inv *= g[0];
                t.accumulate(a, std::move(inv));
            });
        }
    }
}
