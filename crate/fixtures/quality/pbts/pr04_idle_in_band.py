from hypothesis import given, strategies as st
from src.tcs import MockRoom


# Neither heater nor cooler runs while the room is between 21 and 23 degrees
@given(
    total_time=st.integers(min_value=5, max_value=40),
    initial_temp=st.integers(min_value=20, max_value=24),
)
def test_idle_inside_target_band(total_time, initial_temp):
    room = MockRoom(total_time, 1, 1, initial_temp=initial_temp)
    states = room.execute_scenario()
    for prev, cur in zip(states, states[1:]):
        if 21 <= prev.temp <= 23:
            assert cur.heater_state == 0 and cur.cooler_state == 0
