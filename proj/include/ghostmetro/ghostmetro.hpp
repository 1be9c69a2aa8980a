// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ghostmetro/errors.hpp"
#include "ghostmetro/photon_statistics.hpp"
#include "ghostmetro/taylor_jet.hpp"
#include "ghostmetro/mgf.hpp"
#include "ghostmetro/joint_distribution.hpp"
#include "ghostmetro/metrology.hpp"
#include "ghostmetro/montecarlo.hpp"
#include "ghostmetro/profile.hpp"
#include "ghostmetro/counts.hpp"
#include "ghostmetro/report.hpp"
