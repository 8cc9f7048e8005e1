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

// Pieces shared by the CFM and MLP training loops. Not installed.

#ifndef SITEBEAM_TRAINING_HPP
#define SITEBEAM_TRAINING_HPP

#include "sitebeam/cfm.hpp"
#include "sitebeam/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sitebeam::detail
{
    inline std::vector<double> draw_powers(const CfmTrainConfig &cfg, std::size_t n, Rng &rng)
    {
        std::vector<double> powers;
        if (!std::isnan(cfg.power_lo_dbm))
            for (std::size_t i = 0; i < n; ++i)
                powers.push_back(rng.uniform(cfg.power_lo_dbm, cfg.power_hi_dbm));
        return powers;
    }

    // Scaler fitted on one measurement round of the training split.
    inline StatsScaler fit_training_scaler(const SiteDataset &dataset, const Codebook &codebook, const NoiseConfig &noise,
                                           const CfmTrainConfig &cfg)
    {
        const auto channels = dataset.channels(Split::train);
        Rng rng = Rng::derive(cfg.seed, 0x7363ULL);
        const auto powers = draw_powers(cfg, channels.size(), rng);
        const Tensor y = measure_with_powers(codebook, channels, noise, powers, rng.next_u64(), cfg.measurement);
        std::vector<ConditionFeatures> feats;
        for (std::size_t i = 0; i < y.rows(); ++i)
            feats.push_back(normalize_rsrp(y.data().subspan(i * y.cols(), y.cols())));
        return StatsScaler::fit(feats);
    }

    // Fixed validation draws (measurements, t, z0), so the validation curve is
    // comparable across iterations.
    struct ValidationSet
    {
        std::vector<CVec> channels;
        Tensor y;
        ConditionBatch cond;
        Tensor z1, z0, t;
        std::uint64_t sample_seed = 0;
    };

    inline ValidationSet make_validation(const SiteDataset &dataset, const Codebook &codebook, const NoiseConfig &noise,
                                         const CfmTrainConfig &cfg, const StatsScaler &scaler)
    {
        auto idx = dataset.indices(Split::val);
        if (idx.empty())
            idx = dataset.indices(Split::train);
        if (idx.size() > cfg.val_size)
            idx.resize(cfg.val_size);
        ValidationSet v;
        for (std::size_t i : idx)
            v.channels.push_back(dataset.entries[i].h);
        Rng rng = Rng::derive(cfg.seed, 0x76616cULL);
        const auto powers = draw_powers(cfg, v.channels.size(), rng);
        v.y = measure_with_powers(codebook, v.channels, noise, powers, rng.next_u64(), cfg.measurement);
        v.cond = condition_batch(v.y, scaler);
        v.z1 = mrt_targets(v.channels);
        v.t = Tensor({v.channels.size(), 1});
        for (double &x : v.t.data())
            x = rng.uniform();
        v.z0 = Tensor(v.z1.shape());
        for (double &x : v.z0.data())
            x = cfg.sigma0 * rng.normal();
        v.sample_seed = rng.next_u64();
        return v;
    }

    struct TrainingBatch
    {
        std::vector<CVec> channels;
        ConditionBatch cond;
        Tensor z1;
    };

    // Batch of iteration `it`: UEs drawn with replacement from the training
    // split, fresh measurement noise, MRT targets. Consumes `rng`.
    inline TrainingBatch draw_batch(const SiteDataset &dataset, const std::vector<std::size_t> &train,
                                    const Codebook &codebook, const NoiseConfig &noise, const CfmTrainConfig &cfg,
                                    const StatsScaler &scaler, Rng &rng)
    {
        TrainingBatch b;
        for (std::size_t i = 0; i < cfg.batch_size; ++i)
            b.channels.push_back(dataset.entries[train[rng.index(train.size())]].h);
        const auto powers = draw_powers(cfg, cfg.batch_size, rng);
        const Tensor y = measure_with_powers(codebook, b.channels, noise, powers, rng.next_u64(), cfg.measurement);
        b.cond = condition_batch(y, scaler);
        b.z1 = mrt_targets(b.channels);
        return b;
    }

    inline double mean_gap_db(const std::vector<CVec> &channels, const std::vector<CVec> &beams)
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < channels.size(); ++i)
        {
            const double opt = array_gain(channels[i], mrt_beamformer(channels[i]));
            const double g = array_gain(channels[i], beams[i]);
            acc += std::min(10.0 * std::log10(opt / std::max(g, 1e-300)), 100.0);
        }
        return acc / static_cast<double>(channels.size());
    }
}

#endif
