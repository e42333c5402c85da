#include "fbd/forward_dynamics.hpp"
#include "fbd/tilthex.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cstdlib>
#include <new>

namespace {
long g_allocs = 0;
}

void* operator new(std::size_t n) {
  ++g_allocs;
  if (void* p = std::malloc(n ? n : 1)) return p;
  throw std::bad_alloc();
}
void operator delete(void* p) noexcept { std::free(p); }
void operator delete(void* p, std::size_t) noexcept { std::free(p); }

using namespace fbd;

TEST_CASE("recursions do not allocate once the workspaces are sized") {
  RobotModel m = build_branched_tree(4);
  std::mt19937_64 rng(61);
  for (int r : {0, 3, 8}) {
    MotionInput in;
    in.base_pose = oracle::random_pose(rng);
    in.base_twist.resize(6, r + 2);
    in.q.resize(m.n, r + 3);
    oracle::fill_uniform(in.base_twist, rng);
    oracle::fill_uniform(in.q, rng);
    KinematicsCache c;
    GeneralizedForces f;
    LoadWorkspace lw;
    forward_kinematics(m, in, r + 1, c);
    hgrne(m, c, {}, r, f, lw);

    ForwardDynamicsInput fi;
    fi.base_pose = in.base_pose;
    fi.base_twist = in.base_twist.col(0);
    fi.q = in.q.col(0);
    fi.qdot = in.q.col(1);
    fi.base_wrench = f.Q1;
    fi.tau = f.tau;
    ForwardDynamicsWorkspace fw;
    AccelOutput out;
    hgabi(m, fi, r, fw, out);

    long before = g_allocs;
    forward_kinematics(m, in, r + 1, c);
    hgrne(m, c, {}, r, f, lw);
    hgabi(m, fi, r, fw, out);
    long used = g_allocs - before;
    INFO("order " << r);
    CHECK(used == 0);
  }
}
