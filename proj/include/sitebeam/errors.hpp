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

#ifndef SITEBEAM_ERRORS_HPP
#define SITEBEAM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace sitebeam
{
    // Base of every recoverable failure raised by the library. The CLI maps the
    // subclasses onto distinct exit codes.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Invalid configuration, scenario file or command-line input.
    class ConfigError : public Error
    {
    public:
        using Error::Error;
    };

    // Dataset / artifact problems: missing files, malformed content, unusable channels.
    class DataError : public Error
    {
    public:
        using Error::Error;
    };

    // No unblocked propagation path, or paths that cancel to a zero channel.
    class EmptyChannelError : public DataError
    {
    public:
        using DataError::DataError;
    };

    // Non-finite values or failed factorizations during optimization or sampling.
    class NumericalError : public Error
    {
    public:
        using Error::Error;
    };

    class FactorizationError : public NumericalError
    {
    public:
        FactorizationError(const std::string &what, std::size_t pivot_index, double pivot)
            : NumericalError(what), pivot_index_(pivot_index), pivot_(pivot) {}

        std::size_t pivot_index() const { return pivot_index_; }
        double smallest_pivot() const { return pivot_; }

    private:
        std::size_t pivot_index_;
        double pivot_;
    };

    // Training loop stopped on a non-finite value. Carries the trace up to the
    // failing iteration (CSV text) so callers can still write it out.
    class AbortedRun : public NumericalError
    {
    public:
        AbortedRun(const std::string &what, std::string trace_csv)
            : NumericalError(what), trace_csv_(std::move(trace_csv)) {}
        const std::string &trace_csv() const { return trace_csv_; }

    private:
        std::string trace_csv_;
    };

    // Operand shapes that do not conform. This is a programming error, not a data error.
    class ShapeError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };
}

#endif
