import pytest

AGENTS = """\
run,scheme,pi,agent,degree,group,B,L,Q,P0
0,S0,0.0,0,4,alpha,0.5714285714285714,0.2857142857142857,0.5,0.14285714285714285
0,S0,0.0,1,60,alpha,1.0,0.42857142857142855,0.875,0.14285714285714285
0,S0,0.0,2,6,beta,0.2857142857142857,0.14285714285714285,0.125,0.2857142857142857
0,S0,0.0,3,55,beta,0.42857142857142855,0.5714285714285714,0.25,0.21428571428571427
1,S0,0.0,0,5,alpha,0.7142857142857143,0.2857142857142857,0.625,0.14285714285714285
1,S0,0.0,1,58,beta,0.5714285714285714,0.2857142857142857,0.375,0.19047619047619047
0,S1,1.0,0,4,alpha,0.8571428571428571,0.2857142857142857,0.25,0.42857142857142855
0,S1,1.0,1,60,beta,1.0,0.14285714285714285,0.125,1.0
"""

STRATA = """\
scheme,pi,subset,mean_B,mean_L,mean_Q,mean_P0,n_agents
S0,0.0,alpha_h,0.9,0.4,0.8,0.14,2
S0,0.0,alpha_l,0.6,0.3,0.55,0.14,2
S0,0.0,beta_h,0.5,0.43,0.31,0.2,2
S0,0.0,beta_l,0.29,0.14,0.125,0.29,1
S1,0.4,alpha_h,0.92,0.4,0.7,0.17,2
S1,0.4,alpha_l,0.7,0.3,0.4,0.22,2
S1,0.4,beta_h,0.8,0.4,0.2,0.5,2
S1,0.4,beta_l,0.85,0.15,0.14,0.76,1
S1,1.0,alpha_h,0.95,0.4,0.6,0.2,2
S1,1.0,alpha_l,0.8,0.3,0.3,0.33,2
S1,1.0,beta_h,0.97,0.35,0.15,0.81,2
S1,1.0,beta_l,1.0,0.14,0.125,1.0,1
"""

ACTIVITY = """\
scheme,pi,run,items,views,comments,metas,K_total
S0,0.0,0,120,300,80,20,0.0
S0,0.0,1,130,310,85,22,0.0
S1,0.4,0,200,280,70,15,80.0
S1,0.4,1,210,290,72,16,84.0
S1,1.0,0,380,260,50,10,380.0
S1,1.0,1,390,270,52,11,390.0
"""

# pi=0 row has no defined values; the pi=0.4 row has a gap in e_view
EFFECTIVENESS = """\
scheme,pi,k_bar,e_item,e_view,e_comm,e_meta
S0,0.0,0.0,,,,
S1,0.4,0.82,97.5609756097561,,-14.634146341463415,-6.097560975609756
S1,1.0,3.85,67.53246753246754,-20.77922077922078,-16.36363636363636,-5.454545454545454
"""


@pytest.fixture()
def csv_dir(tmp_path):
    (tmp_path / "agents.csv").write_text(AGENTS)
    (tmp_path / "strata.csv").write_text(STRATA)
    (tmp_path / "activity.csv").write_text(ACTIVITY)
    (tmp_path / "effectiveness.csv").write_text(EFFECTIVENESS)
    return tmp_path
