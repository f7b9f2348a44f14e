from hypothesis import given, strategies as st
from src.pcs import MockSystem


# The horizontal cylinder does not move while the vertical cylinder is down
@given(
    total_time=st.floats(min_value=1.0, max_value=100.0),
    cylinder_interval=st.floats(min_value=0.1, max_value=10.0),
    controller_interval=st.floats(min_value=0.1, max_value=10.0),
    mock_interval=st.floats(min_value=0.1, max_value=10.0),
)
def test_horizontal_still_while_vertical_down(total_time, cylinder_interval, controller_interval, mock_interval):
    system = MockSystem(total_time, cylinder_interval, controller_interval, mock_interval)
    collected_states = system.execute_scenario()

    for state in collected_states:
        if state.cylinder_b_location > 0:
            assert not state.a_moving, f"A moved with B at {state.cylinder_b_location}"
