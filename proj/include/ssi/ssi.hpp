/*
 * Copyright 2026 The SSI Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#ifndef SSI_SSI_HPP
#define SSI_SSI_HPP

#include "analysis.hpp"
#include "bea.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "flowmap_baseline.hpp"
#include "gp_model.hpp"
#include "integrators.hpp"
#include "io.hpp"
#include "kernels.hpp"
#include "phase_space.hpp"
#include "sampling.hpp"
#include "systems.hpp"

#endif // SSI_SSI_HPP
