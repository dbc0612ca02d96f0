#pragma once

#include "secretary/cutoffs.hpp"
#include "secretary/harness.hpp"
#include "secretary/oracle.hpp"
#include "secretary/params.hpp"
#include "secretary/report.hpp"
#include "secretary/rules.hpp"
#include "secretary/seeding.hpp"
#include "secretary/seqgen.hpp"
