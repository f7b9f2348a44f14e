from hypothesis import given, strategies as st
from examples.gpiozero.apps.pcs.src.pcs import MockSystem


# Test that the cylinder locations remain within the bounds (0 and 2) at all times.
@given(
    total_time=st.floats(min_value=1.0, max_value=100.0),
    cylinder_interval=st.floats(min_value=0.1, max_value=10.0),
    controller_interval=st.floats(min_value=0.1, max_value=10.0),
    mock_interval=st.floats(min_value=0.1, max_value=10.0),
)
def test_cylinder_location_in_bounds(total_time, cylinder_interval, controller_interval, mock_interval):
    system = MockSystem(total_time, cylinder_interval, controller_interval, mock_interval)
    collected_states = system.execute_scenario()

    for state in collected_states:
        assert 0 <= state.cylinder_a_loc <= 2, f"Cylinder A out of bounds: {state.cylinder_a_loc}"
        assert 0 <= state.cylinder_b_location <= 2, f"Cylinder B out of bounds: {state.cylinder_b_location}"
