from hypothesis import given, strategies as st
from src.pcs import MockSystem


# A cylinder never covers more than one unit per second
@given(
    total_time=st.floats(min_value=1.0, max_value=100.0),
    cylinder_interval=st.floats(min_value=0.1, max_value=10.0),
    controller_interval=st.floats(min_value=0.1, max_value=10.0),
    mock_interval=st.floats(min_value=0.1, max_value=10.0),
)
def test_cylinder_speed_at_most_one(total_time, cylinder_interval, controller_interval, mock_interval):
    system = MockSystem(total_time, cylinder_interval, controller_interval, mock_interval)
    collected_states = system.execute_scenario()

    limit = 1.0 * cylinder_interval + 1e-9
    a, b = 0.0, 0.0
    for state in collected_states:
        assert abs(state.cylinder_a_loc - a) <= limit
        assert abs(state.cylinder_b_location - b) <= limit
        a, b = state.cylinder_a_loc, state.cylinder_b_location
