// SPDX-License-Identifier: Apache-2.0
//
// irsce - compressive channel estimation for IRS-aided mmWave massive MIMO-OFDM
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

#ifndef IRSCE_IRSCE_HPP
#define IRSCE_IRSCE_HPP

#include "irsce/array.hpp"
#include "irsce/channel.hpp"
#include "irsce/common.hpp"
#include "irsce/config.hpp"
#include "irsce/dictionary.hpp"
#include "irsce/harness.hpp"
#include "irsce/pilot.hpp"
#include "irsce/recovery.hpp"
#include "irsce/rng.hpp"

#endif // IRSCE_IRSCE_HPP
