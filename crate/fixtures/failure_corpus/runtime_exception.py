from hypothesis import given, strategies as st
from src.pcs import MockSystem


@given(total_time=st.floats(min_value=1.0, max_value=10.0))
def test_zero_interval(total_time):
    system = MockSystem(total_time, 0, 1, 1)
    for state in system.execute_scenario():
        assert 0 <= state.cylinder_a_loc <= 2
