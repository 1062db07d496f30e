#pragma once

#include "inferlab/bayes.hpp"
#include "inferlab/case_models.hpp"
#include "inferlab/clt.hpp"
#include "inferlab/csv.hpp"
#include "inferlab/distributions.hpp"
#include "inferlab/ensemble.hpp"
#include "inferlab/error.hpp"
#include "inferlab/estimators.hpp"
#include "inferlab/outliers.hpp"
#include "inferlab/random.hpp"
#include "inferlab/regression.hpp"
#include "inferlab/special_functions.hpp"
#include "inferlab/student.hpp"
#include "inferlab/version.hpp"
