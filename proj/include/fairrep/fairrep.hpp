#pragma once

#include "fairrep/alphabet.hpp"
#include "fairrep/bounds.hpp"
#include "fairrep/channel.hpp"
#include "fairrep/common.hpp"
#include "fairrep/csv.hpp"
#include "fairrep/frl.hpp"
#include "fairrep/joint.hpp"
#include "fairrep/joint_io.hpp"
#include "fairrep/measures.hpp"
#include "fairrep/mechanism.hpp"
#include "fairrep/oracle.hpp"
#include "fairrep/plot.hpp"
#include "fairrep/typewriter.hpp"
