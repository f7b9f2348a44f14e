from hypothesis import given, strategies as st
from src.pcs import MockSystem


# The cylinders move one at a time
@given(
    total_time=st.floats(min_value=1.0, max_value=100.0),
    cylinder_interval=st.floats(min_value=0.1, max_value=10.0),
    controller_interval=st.floats(min_value=0.1, max_value=10.0),
    mock_interval=st.floats(min_value=0.1, max_value=10.0),
)
def test_cylinders_move_one_at_a_time(total_time, cylinder_interval, controller_interval, mock_interval):
    system = MockSystem(total_time, cylinder_interval, controller_interval, mock_interval)
    collected_states = system.execute_scenario()

    for state in collected_states:
        assert not (state.a_moving and state.b_moving)
